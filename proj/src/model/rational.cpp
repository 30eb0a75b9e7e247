#include "abductree/rational.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace abductree {

namespace {

mpz_class pow10(unsigned long exponent)
{
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
    return result;
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Rational parse_decimal(std::string_view text)
{
    const std::string_view original = text;
    auto fail = [&]() -> Rational {
        throw std::invalid_argument("not a decimal number: '" + std::string(original) + "'");
    };

    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    std::string digits;
    long scale = 0;  // value = digits * 10^-scale
    std::size_t pos = 0;
    bool any_digit = false;
    while (pos < text.size() && is_digit(text[pos])) {
        digits.push_back(text[pos++]);
        any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && is_digit(text[pos])) {
            digits.push_back(text[pos++]);
            ++scale;
            any_digit = true;
        }
    }
    if (!any_digit)
        return fail();

    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !is_digit(text[pos]))
            return fail();
        long exponent = 0;
        while (pos < text.size() && is_digit(text[pos])) {
            exponent = exponent * 10 + (text[pos++] - '0');
            if (exponent > 100000)
                return fail();
        }
        scale += exp_negative ? exponent : -exponent;
    }
    if (pos != text.size())
        return fail();

    mpz_class numerator(digits, 10);
    if (negative)
        numerator = -numerator;

    Rational result;
    if (scale >= 0) {
        result = Rational(numerator, pow10(static_cast<unsigned long>(scale)));
    } else {
        result = Rational(numerator * pow10(static_cast<unsigned long>(-scale)));
    }
    result.canonicalize();
    return result;
}

bool is_finite_decimal(const Rational& value)
{
    mpz_class den = value.get_den();
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2))
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 2);
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5))
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
    return den == 1;
}

std::string to_decimal_string(const Rational& value)
{
    if (!is_finite_decimal(value))
        throw std::domain_error("value has no terminating decimal expansion: " + value.get_str());

    // Smallest k with den | 10^k.
    unsigned long twos = mpz_scan1(value.get_den_mpz_t(), 0);
    mpz_class den = value.get_den();
    unsigned long fives = 0;
    mpz_fdiv_q_2exp(den.get_mpz_t(), den.get_mpz_t(), twos);
    while (den != 1) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
        ++fives;
    }
    const unsigned long k = std::max(twos, fives);

    mpz_class scaled = value.get_num() * pow10(k) / value.get_den();
    const bool negative = scaled < 0;
    if (negative)
        scaled = -scaled;
    std::string digits = scaled.get_str();
    if (k > 0) {
        if (digits.size() <= k)
            digits.insert(0, k - digits.size() + 1, '0');
        digits.insert(digits.size() - k, 1, '.');
    }
    return negative ? "-" + digits : digits;
}

std::string to_fixed_string(const Rational& value, int digits)
{
    if (digits < 0)
        throw std::invalid_argument("negative digit count");
    const mpz_class scale = pow10(static_cast<unsigned long>(digits));
    Rational scaled = abs(value) * scale;
    // round half away from zero
    mpz_class rounded = (scaled.get_num() * 2 + scaled.get_den()) / (scaled.get_den() * 2);
    Rational result(rounded, scale);
    result.canonicalize();
    if (value < 0 && rounded != 0)
        result = -result;

    std::string text = to_decimal_string(result);
    auto dot = text.find('.');
    if (digits > 0) {
        if (dot == std::string::npos) {
            text += '.';
            dot = text.size() - 1;
        }
        const std::size_t have = text.size() - dot - 1;
        text.append(static_cast<std::size_t>(digits) - have, '0');
    }
    return text;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace abductree
