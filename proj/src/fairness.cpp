#include "fairtt/fairness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace fairtt {

WeightMultiset::WeightMultiset(std::vector<Penalty> items) : items_(std::move(items)) {
    for (Penalty v : items_) {
        if (v < 0) throw std::invalid_argument("WeightMultiset: negative item");
    }
    std::sort(items_.begin(), items_.end(), std::greater<>());
}

void WeightMultiset::insert(Penalty value) {
    if (value < 0) throw std::invalid_argument("WeightMultiset: negative item");
    auto pos = std::lower_bound(items_.begin(), items_.end(), value, std::greater<>());
    items_.insert(pos, value);
}

void WeightMultiset::merge(const WeightMultiset& other) {
    std::vector<Penalty> merged;
    merged.reserve(items_.size() + other.items_.size());
    std::merge(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
               std::back_inserter(merged), std::greater<>());
    items_ = std::move(merged);
}

SortedAllocation SortedAllocation::of(std::vector<Penalty> values) {
    for (Penalty v : values) {
        if (v < 0) throw std::invalid_argument("SortedAllocation: negative value");
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    return SortedAllocation(sorted_tag{}, std::move(values));
}

std::strong_ordering leximax_compare(const SortedAllocation& a, const SortedAllocation& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
}

Rank binomial(long long top, long long bottom) {
    if (bottom < 0 || top < 0 || bottom > top) return 0;
    if (bottom > top - bottom) bottom = top - bottom;
    Rank acc = 1;
    for (long long i = 1; i <= bottom; ++i) {
        acc *= top - bottom + i;
        acc /= i;  // exact: prefix products of binomial factors divide evenly
    }
    return acc;
}

Rank rank(const SortedAllocation& s) {
    const auto& x = s.values();
    const long long n = static_cast<long long>(x.size());
    Rank total = 0;
    for (long long i = 1; i <= n; ++i) {
        total += binomial(n + x[i - 1] - i, x[i - 1] - 1);
    }
    return total;
}

namespace {

// Number of sorted length-n sequences strictly below (x, 0, ..., 0).
Rank head_term(long long n, Penalty x) { return binomial(n + x - 1, x - 1); }

}  // namespace

Rank rank_recursive(const SortedAllocation& s) {
    const auto& x = s.values();
    Rank total = 0;
    long long remaining = static_cast<long long>(x.size());
    for (Penalty v : x) {
        total += head_term(remaining, v);
        --remaining;
    }
    return total;
}

SortedAllocation unrank(const Rank& r, std::size_t n) {
    if (r < 0) throw std::invalid_argument("unrank: negative rank");
    if (n == 0) {
        if (r != 0) throw std::invalid_argument("unrank: no length-0 sequence with positive rank");
        return SortedAllocation{};
    }
    std::vector<Penalty> values;
    values.reserve(n);
    Rank rest = r;
    for (std::size_t i = 0; i < n; ++i) {
        const long long len = static_cast<long long>(n - i);
        // Largest v with head_term(len, v) <= rest.
        Penalty lo = 0, hi = 1;
        while (head_term(len, hi) <= rest) hi *= 2;
        while (lo < hi - 1) {
            Penalty mid = lo + (hi - lo) / 2;
            if (head_term(len, mid) <= rest) lo = mid; else hi = mid;
        }
        rest -= head_term(len, lo);
        values.push_back(lo);
    }
    SortedAllocation result(SortedAllocation::sorted_tag{}, std::move(values));
    if (rank(result) != r) throw std::logic_error("unrank: re-rank check failed");
    return result;
}

Rank rho_min(const WeightMultiset& x) { return rank(SortedAllocation(x)); }

Rank rho_max(const WeightMultiset& x, Penalty value_cap) {
    // items() is non-increasing, so walking it in reverse gives the
    // non-decreasing sequence; cap minus that is non-increasing as required.
    std::vector<Penalty> desc;
    desc.reserve(x.size());
    for (auto it = x.items().rbegin(); it != x.items().rend(); ++it) {
        if (*it > value_cap) throw std::invalid_argument("rho_max: item exceeds value_cap");
        desc.push_back(value_cap - *it);
    }
    return rank(SortedAllocation(SortedAllocation::sorted_tag{}, std::move(desc)));
}

SortedAllocation average_allocation(std::span<const SortedAllocation> xs, std::size_t n) {
    if (xs.empty()) throw std::invalid_argument("average_allocation: empty input");
    Rank sum = 0;
    for (const auto& s : xs) {
        if (s.size() != n) throw std::invalid_argument("average_allocation: length mismatch");
        sum += rank(s);
    }
    const Rank count = static_cast<long long>(xs.size());
    // Round half up: floor((2*sum + count) / (2*count)); everything is >= 0.
    Rank rounded = (2 * sum + count) / (2 * count);
    return unrank(rounded, n);
}

std::string format_allocation(const SortedAllocation& a, bool braced) {
    const auto& v = a.values();
    std::string out;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (!out.empty()) out += ',';
        out += std::to_string(v[i]);
        const std::size_t mult = j - i;
        if (mult > 1) {
            out += '^';
            if (braced) out += '{';
            out += std::to_string(mult);
            if (braced) out += '}';
        }
        i = j;
    }
    return out;
}

namespace {

long long parse_number(std::string_view token, std::string_view what) {
    long long value = 0;
    if (token.empty()) throw std::invalid_argument(std::string("allocation notation: empty ") + std::string(what));
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw std::invalid_argument(std::string("allocation notation: bad ") + std::string(what) + " '" +
                                    std::string(token) + "'");
    }
    return value;
}

}  // namespace

SortedAllocation parse_allocation(std::string_view text) {
    std::vector<Penalty> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view token = text.substr(pos, comma - pos);
        // trim spaces
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
        if (token.empty()) throw std::invalid_argument("allocation notation: empty entry");

        std::string_view value_part = token;
        long long mult = 1;
        if (std::size_t caret = token.find('^'); caret != std::string_view::npos) {
            value_part = token.substr(0, caret);
            std::string_view mult_part = token.substr(caret + 1);
            if (mult_part.size() >= 2 && mult_part.front() == '{' && mult_part.back() == '}') {
                mult_part = mult_part.substr(1, mult_part.size() - 2);
            }
            mult = parse_number(mult_part, "multiplicity");
            if (mult < 1) throw std::invalid_argument("allocation notation: multiplicity < 1");
        }
        const long long value = parse_number(value_part, "value");
        if (value < 0) throw std::invalid_argument("allocation notation: negative value");
        if (!values.empty() && value > values.back()) {
            throw std::invalid_argument("allocation notation: values must be non-increasing");
        }
        values.insert(values.end(), static_cast<std::size_t>(mult), value);
        pos = comma + 1;
        if (pos == text.size() && comma != text.size()) {
            throw std::invalid_argument("allocation notation: trailing comma");
        }
    }
    return SortedAllocation::of(std::move(values));
}

}  // namespace fairtt
