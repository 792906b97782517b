#include "tsel/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tsel {

namespace {

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw std::invalid_argument("empty number in schedule spec");
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("bad number in schedule spec: " + tok);
        out.push_back(v);
    }
    return out;
}

bool is_positive_integer(double v) {
    return v >= 1.0 && v == std::floor(v);
}

}  // namespace

ScheduleSpec ScheduleSpec::parse(const std::string& text) {
    auto colon = text.find(':');
    ScheduleSpec spec;
    spec.kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto one = [&](const char* what) {
        auto vals = split_doubles(args);
        if (vals.size() != 1)
            throw std::invalid_argument(std::string("schedule '") + spec.kind + "' needs one " + what);
        return vals[0];
    };
    if (spec.kind == "power") {
        spec.alpha = one("decay exponent");
    } else if (spec.kind == "log") {
        spec.offset = one("offset");
    } else if (spec.kind == "poly") {
        auto vals = split_doubles(args);
        if (vals.empty() || vals.size() > 2)
            throw std::invalid_argument("schedule 'poly' needs exponent[,scale]");
        spec.exponent = vals[0];
        spec.scale = vals.size() == 2 ? vals[1] : 1.0;
    } else if (spec.kind == "const") {
        spec.value = one("value");
    } else if (spec.kind == "explicit") {
        spec.values = split_doubles(args);
    } else {
        throw std::invalid_argument("unknown schedule kind: " + spec.kind);
    }
    return spec;
}

std::string ScheduleSpec::text() const {
    std::ostringstream os;
    os << kind << ':';
    if (kind == "power") {
        os << alpha;
    } else if (kind == "log") {
        os << offset;
    } else if (kind == "poly") {
        os << exponent << ',' << scale;
    } else if (kind == "const") {
        os << value;
    } else if (kind == "explicit") {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) os << ',';
            os << values[i];
        }
    }
    return os.str();
}

ThresholdSchedule ThresholdSchedule::power_decay(double alpha) {
    ScheduleSpec spec;
    spec.kind = "power";
    spec.alpha = alpha;
    return build_schedule(spec, ScheduleDomain::Real);
}

ThresholdSchedule ThresholdSchedule::log_growth(double offset) {
    ScheduleSpec spec;
    spec.kind = "log";
    spec.offset = offset;
    return build_schedule(spec, ScheduleDomain::Integer);
}

ThresholdSchedule ThresholdSchedule::poly_growth(double exponent, double scale) {
    ScheduleSpec spec;
    spec.kind = "poly";
    spec.exponent = exponent;
    spec.scale = scale;
    return build_schedule(spec, ScheduleDomain::Integer);
}

ThresholdSchedule ThresholdSchedule::constant(double value, ScheduleDomain domain) {
    ScheduleSpec spec;
    spec.kind = "const";
    spec.value = value;
    return build_schedule(spec, domain);
}

ThresholdSchedule ThresholdSchedule::explicit_values(std::vector<double> values,
                                                     ScheduleDomain domain) {
    ScheduleSpec spec;
    spec.kind = "explicit";
    spec.values = std::move(values);
    return build_schedule(spec, domain);
}

ThresholdSchedule build_schedule(const ScheduleSpec& spec, ScheduleDomain domain) {
    using Kind = ThresholdSchedule::Kind;
    if (spec.kind == "power") {
        if (!(spec.alpha >= 0.0 && spec.alpha < 1.0))
            throw std::invalid_argument("power schedule needs alpha in [0, 1)");
        if (domain == ScheduleDomain::Integer)
            throw std::invalid_argument("power schedule is real-valued; not usable as an integer schedule");
        return ThresholdSchedule(Kind::PowerDecay, domain, spec);
    }
    if (spec.kind == "log") {
        if (domain == ScheduleDomain::Real)
            throw std::invalid_argument("log schedule is integer-valued; not usable as a real schedule");
        return ThresholdSchedule(Kind::LogGrowth, domain, spec);
    }
    if (spec.kind == "poly") {
        if (domain == ScheduleDomain::Real)
            throw std::invalid_argument("poly schedule is integer-valued; not usable as a real schedule");
        if (spec.exponent < 0.0) throw std::invalid_argument("poly schedule needs exponent >= 0");
        if (!(spec.scale > 0.0)) throw std::invalid_argument("poly schedule needs scale > 0");
        return ThresholdSchedule(Kind::PolyGrowth, domain, spec);
    }
    if (spec.kind == "const") {
        if (domain == ScheduleDomain::Real) {
            if (!(spec.value > 0.0 && spec.value <= 1.0))
                throw std::invalid_argument("constant real schedule needs value in (0, 1]");
        } else {
            if (!is_positive_integer(spec.value))
                throw std::invalid_argument("constant integer schedule needs a positive integer value");
        }
        return ThresholdSchedule(Kind::Constant, domain, spec);
    }
    if (spec.kind == "explicit") {
        const auto& v = spec.values;
        if (v.empty()) throw std::invalid_argument("explicit schedule needs at least one value");
        if (domain == ScheduleDomain::Real) {
            for (double x : v)
                if (!(x > 0.0 && x <= 1.0))
                    throw std::invalid_argument("explicit real schedule values must lie in (0, 1]");
            if (!std::is_sorted(v.rbegin(), v.rend()))
                throw std::invalid_argument("explicit real schedule must be nonincreasing");
        } else {
            for (double x : v)
                if (!is_positive_integer(x))
                    throw std::invalid_argument("explicit integer schedule values must be positive integers");
            if (!std::is_sorted(v.begin(), v.end()))
                throw std::invalid_argument("explicit integer schedule must be nondecreasing");
        }
        return ThresholdSchedule(Kind::Explicit, domain, spec);
    }
    throw std::invalid_argument("unknown schedule kind: " + spec.kind);
}

double ThresholdSchedule::value_at(std::int64_t i) const {
    if (i < 1) throw std::invalid_argument("schedule index must be >= 1");
    switch (kind_) {
        case Kind::PowerDecay:
            return std::pow(static_cast<double>(i), -spec_.alpha);
        case Kind::LogGrowth:
            return std::max(1.0, std::ceil(std::log2(static_cast<double>(i)) + spec_.offset));
        case Kind::PolyGrowth:
            return std::max(1.0, std::ceil(spec_.scale * std::pow(static_cast<double>(i), spec_.exponent)));
        case Kind::Constant:
            return spec_.value;
        case Kind::Explicit: {
            // Clamp past the end so short hand-written schedules drive long runs.
            std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(i), spec_.values.size());
            return spec_.values[idx - 1];
        }
    }
    throw std::logic_error("unreachable schedule kind");
}

std::int64_t ThresholdSchedule::integer_at(std::int64_t i) const {
    if (domain_ != ScheduleDomain::Integer)
        throw std::logic_error("integer_at on a real-valued schedule");
    return static_cast<std::int64_t>(std::llround(value_at(i)));
}

double ThresholdSchedule::power_alpha() const {
    if (kind_ != Kind::PowerDecay) throw std::logic_error("power_alpha on a non-power schedule");
    return spec_.alpha;
}

}  // namespace tsel
