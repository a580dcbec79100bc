#include "wormnc/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace wormnc {

Rat rat_from_string(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rat r(s);  // GMP accepts "p/q" directly
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
        r.canonicalize();
        return r;
    }

    // Decimal / scientific form: mantissa [. fraction] [e exponent]
    long exp10 = 0;
    std::string mantissa = s;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        exp10 = std::stol(s.substr(e + 1));
        mantissa = s.substr(0, e);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (std::size_t i = 0; i < mantissa.size(); ++i) {
        char c = mantissa[i];
        if (c == '.') {
            if (seen_point) throw std::invalid_argument("bad rational literal: " + text);
            seen_point = true;
        } else if ((c == '+' || c == '-') && i == 0) {
            digits.push_back(c);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++frac_digits;
        } else {
            throw std::invalid_argument("bad rational literal: " + text);
        }
    }
    if (digits.empty() || digits == "+" || digits == "-")
        throw std::invalid_argument("bad rational literal: " + text);

    Rat value{mpz_class(digits)};
    long shift = exp10 - frac_digits;
    if (shift != 0) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift > 0 ? shift : -shift));
        if (shift > 0)
            value *= Rat(pow10);
        else
            value /= Rat(pow10);
    }
    value.canonicalize();
    return value;
}

double rat_to_double(const Rat& r) { return r.get_d(); }

std::string rat_to_decimal(const Rat& r, int digits, bool round_up) {
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    // scaled = r * 10^digits, then divide with the requested rounding.
    mpz_class num = r.get_num() * pow10;
    const mpz_class& den = r.get_den();
    mpz_class q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (rem != 0) {
        if (round_up) {
            q += 1;  // toward +infinity
        } else {
            // round half up on the absolute remainder
            if (2 * rem >= den) q += 1;
        }
    }
    bool negative = q < 0;
    mpz_class absq = abs(q);
    std::string raw = absq.get_str();
    if (static_cast<int>(raw.size()) <= digits)
        raw.insert(0, static_cast<std::size_t>(digits + 1 - raw.size()), '0');
    std::string out = raw.substr(0, raw.size() - digits);
    if (digits > 0) out += "." + raw.substr(raw.size() - digits);
    if (negative && absq != 0) out.insert(0, 1, '-');
    return out;
}

std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace wormnc
