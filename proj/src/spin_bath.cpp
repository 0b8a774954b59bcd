#include "decoscatter/spin_bath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deco {

void ModelParams::validate() const {
    if (!(m > 0.0))
        throw std::invalid_argument("ModelParams: mass must be positive, got " + std::to_string(m));
    if (N < 1)
        throw std::invalid_argument("ModelParams: spin count must be >= 1, got " + std::to_string(N));
    if (!std::isfinite(mu))
        throw std::invalid_argument("ModelParams: coupling must be finite");
}

std::vector<SpinSector> enumerate_sectors(const ModelParams& params) {
    params.validate();
    const int N = params.N;

    std::vector<SpinSector> sectors(static_cast<std::size_t>(N) + 1);
    // Ascending half up to the center; exact mirror for the rest.
    long double w = std::exp2l(static_cast<long double>(-N));  // 2^-N, normal even at N = 10^4
    long double mult = 1.0L;
    for (int j = 0; j <= N / 2; ++j) {
        sectors[j].j = j;
        sectors[j].weight = w;
        sectors[j].multiplicity = mult;
        sectors[N - j].j = N - j;
        sectors[N - j].weight = w;
        sectors[N - j].multiplicity = mult;
        // Multiply before dividing: the dividend and quotient are integers,
        // so each step stays exact while it fits the 64-bit mantissa.
        w = w * static_cast<long double>(N - j) / static_cast<long double>(j + 1);
        mult = mult * static_cast<long double>(N - j) / static_cast<long double>(j + 1);
    }
    for (int j = 0; j <= N; ++j)
        sectors[j].twice_ms = 2 * j - N;

    long double sum = 0.0L;
    for (const auto& s : sectors) sum += s.weight;
    for (auto& s : sectors) s.weight /= sum;
    return sectors;
}

double sector_moment(const std::vector<SpinSector>& sectors, int p) {
    if (p < 0)
        throw std::invalid_argument("sector_moment: power must be >= 0, got " + std::to_string(p));
    const int N = static_cast<int>(sectors.size()) - 1;
    auto signed_power = [p](int twice_ms) -> long double {
        if (p == 0) return 1.0L;
        if (twice_ms == 0) return 0.0L;
        long double t = powl(fabsl(0.5L * twice_ms), p);
        return (twice_ms < 0 && p % 2 == 1) ? -t : t;
    };
    // Mirror pairs summed together: for odd p the bracket is exactly 0.
    long double acc = 0.0L;
    for (int j = 0; 2 * j < N; ++j)
        acc += sectors[j].weight * (signed_power(sectors[j].twice_ms) + signed_power(sectors[N - j].twice_ms));
    if (N % 2 == 0)
        acc += sectors[N / 2].weight * signed_power(sectors[N / 2].twice_ms);
    return static_cast<double>(acc);
}

}  // namespace deco
