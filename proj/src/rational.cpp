#include "hinf/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace hinf {

mpq_class parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty rational");
    if (s.find('/') != std::string::npos) {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + raw);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + raw);
        q.canonicalize();
        return q;
    }
    // decimal with optional exponent
    std::string mant = s;
    long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        exp10 = std::stol(s.substr(epos + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad number: " + raw);
    mpz_class num(digits, 10);
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    mpq_class q = exp10 >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

std::string to_string(const mpq_class& q) { return q.get_str(10); }

mpq_class round_to_grid(double x, long den) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    mpq_class q(static_cast<long>(std::llround(x * static_cast<double>(den))), den);
    q.canonicalize();
    return q;
}

} // namespace hinf
