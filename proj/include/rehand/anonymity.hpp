/**
 * @file anonymity.hpp
 * @brief Eavesdropper's view of fast-handover requests as an XOR-linear
 *        system over GF(2).
 *
 * Each observed (lambda, I) gives rID_u xor bR_I = lambda. Unknowns are the
 * b anonymous identities and the k blind factors of one region. Every bit
 * plane has the same incidence matrix, so rank is computed on symbols.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rehand/bytes.hpp"
#include "rehand/messages.hpp"
#include "rehand/random.hpp"

namespace rehand::anon {

struct Observation {
    AnonId lambda;
    std::uint16_t index = 0;     // I, 1-based
    std::uint32_t true_ue = 0;   // hidden label in [0, b)
};

struct ObservationSet {
    std::vector<Observation> observations;
    std::uint32_t b = 0;  // distinct anonymous identities
    std::uint16_t k = 0;  // blind factors in the region

    /// Sessions per identity when every identity has the same count, else 0.
    std::uint32_t sessions_per_ue() const;
    /// a*b - b with a*b read as the observation count.
    std::int64_t lemma_bound() const { return static_cast<std::int64_t>(observations.size()) - b; }
    /// Throws Error(ParamError) if k == 0, b == 0, an index is outside
    /// [1, k] or a label is outside [0, b).
    void validate() const;
};

class XorSystem {
public:
    XorSystem(std::size_t b, std::size_t k);

    std::size_t b() const noexcept { return b_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t columns() const noexcept { return b_ + k_; }
    std::size_t rows() const noexcept { return rows_.size(); }

    /// rID_ue xor bR_index = rhs, index 1-based.
    void add_row(std::size_t ue, std::size_t index, const AnonId& rhs);
    bool coefficient(std::size_t row, std::size_t column) const;
    const AnonId& rhs(std::size_t row) const { return rhs_.at(row); }

    struct Reduction {
        std::size_t rank = 0;
        bool consistent = true;
    };
    /// Gaussian elimination over GF(2), carrying the 128-bit right-hand sides.
    Reduction reduce() const;

private:
    std::size_t b_, k_, words_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<AnonId> rhs_;
};

/// One row per observation, mapped to `assignment[i]` as its identity.
/// Throws Error(ParamError) for a wrong-length assignment or out-of-range
/// identity/index.
XorSystem build_system(const ObservationSet& obs, const std::vector<std::uint32_t>& assignment);

/// The true labels as an assignment.
std::vector<std::uint32_t> true_assignment(const ObservationSet& obs);

/// (b + k) - rank. Throws Error(Inconsistent) if the system has no solution.
std::size_t solution_space_dim(const XorSystem& sys);

/// solution_space_dim >= 1 under the true assignment. Throws Error(ParamError) for k == 0.
bool is_unlinkable(const ObservationSet& obs);

struct Verdict {
    std::uint32_t region = 0;
    std::size_t observations = 0;
    std::uint32_t b = 0;
    std::uint16_t k = 0;
    std::uint32_t a = 0;         // equal per-identity session count, 0 if uneven
    std::size_t rank = 0;
    std::size_t dim = 0;
    std::size_t exposed = 0;     // rows - rank: relations the eavesdropper learns for free
    bool bound_holds = false;    // k > a*b - b
    bool unlinkable = false;
};

Verdict analyse(const ObservationSet& obs, std::uint32_t region = 0);
void write_verdict(std::ostream& out, const Verdict& v);

/// Runs the real entities: one region with k blind factors, b UEs each doing
/// an initial handover and then `a` accepted fast handovers.
ObservationSet generate_observations(std::uint32_t a, std::uint32_t b, std::uint16_t k, RandomSource& rng);

}  // namespace rehand::anon
