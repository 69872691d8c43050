#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrsearch/fpmodel.hpp"
#include "hrsearch/function.hpp"
#include "hrsearch/lowerbound.hpp"
#include "hrsearch/oracle.hpp"
#include "hrsearch/polygen.hpp"

namespace hrsearch {

enum class AlgorithmChoice { lefevre, lefevre_swap, regular, regular_unrolled, automatic };

std::string_view to_string(AlgorithmChoice a);
std::optional<AlgorithmChoice> parse_algorithm_choice(std::string_view s);

struct PhaseConfig {
  AlgorithmChoice algorithm = AlgorithmChoice::regular;
  DivisionMode division = DivisionMode::hybrid;
  // Subdomains per failing domain in phase 2.
  std::uint64_t split = 8;
  unsigned workers = 1;
  // Automatic choice: Lefevre's algorithm once more than this fraction of
  // the previous interval's domains reached phase 3.
  double auto_threshold = 1e-3;
  int word_bits = 64;

  void validate() const;
};

struct SearchPlan {
  std::shared_ptr<const Function> function;
  FpFormat format;
  int binade = 0;
  PolyGenConfig polygen;
  PhaseConfig phases;
  // Domains [first_domain, first_domain + domain_count) of the binade;
  // a count of zero runs to the end of the binade.
  std::uint64_t first_domain = 0;
  std::uint64_t domain_count = 0;
  bool timing = false;
};

// max(2, floor((p - 4) / 3)) bits.
int default_domain_bits(int precision);

// Fills in tau, mu, nu, the budget and the domain count, then validates.
SearchPlan resolve_plan(SearchPlan plan);

// A domain's polynomial in the binomial basis, in output ulps scaled by
// 2^frac_bits, with the error bound of the approximation in the same units.
struct DomainPoly {
  std::uint64_t domain = 0;
  std::uint64_t offset = 0;  // index of the first argument within the binade
  std::uint64_t count = 0;
  BinomialPoly poly;
  mpz_class approx_error;
};

struct PhaseContext {
  FpFormat format;
  int word_bits = 64;
  DivisionMode division = DivisionMode::hybrid;
  std::uint64_t split = 8;
  unsigned workers = 1;
};

// The degree-one test for a domain: the minimum of (b - x a) mod 1 is at
// least eps exactly when no argument can be hard-to-round. Empty when the
// domain must be enumerated instead, because it straddles a change of
// output exponent or its error budget leaves nothing to test.
template <FracWord Word>
std::optional<SearchProblem<Word>> boolean_test(const DomainPoly& dp, const FpFormat& fmt);

// Indices of the domains whose test fails.
std::vector<std::size_t> phase1(std::span<const DomainPoly> domains, const PhaseContext& ctx,
                                LowerBoundAlgorithm algo);
// Failing domains cut into ctx.split pieces; returns the failing pieces.
std::vector<DomainPoly> phase2(std::span<const DomainPoly> domains, const PhaseContext& ctx,
                               LowerBoundAlgorithm algo, std::uint64_t* tested = nullptr);

struct Candidate {
  std::uint64_t domain = 0;
  std::uint64_t offset = 0;
};

// Every argument, evaluated with difference tables, compared against
// eps + approximation error.
std::vector<Candidate> phase3_exhaustive(std::span<const DomainPoly> domains,
                                         const PhaseContext& ctx);

// Candidates re-checked with the guarded evaluator.
std::vector<HrCaseRecord> confirm(std::span<const Candidate> candidates, const Function& f,
                                  const FpFormat& fmt, int binade, unsigned workers);

struct PhaseRow {
  std::string phase;
  std::uint64_t domains_in = 0;
  std::uint64_t domains_out = 0;
  std::uint64_t arguments_covered = 0;
  double wall_ms = 0;
};

struct IntervalChoice {
  std::uint64_t interval = 0;
  LowerBoundAlgorithm algorithm = LowerBoundAlgorithm::regular;
};

struct PhaseStats {
  PhaseRow phase1{"phase1"}, phase2{"phase2"}, phase3{"phase3"}, confirm{"confirm"};
  std::vector<IntervalChoice> choices;

  std::vector<PhaseRow> rows() const { return {phase1, phase2, phase3, confirm}; }
  void merge(const PhaseStats& other);
};

struct PipelineResult {
  std::vector<HrCaseRecord> records;
  PhaseStats stats;
};

// The polynomials of interval t of a resolved plan.
std::vector<DomainPoly> interval_polys(const SearchPlan& plan, std::uint64_t t);

// Lefevre's algorithm when the previous interval sent at least `threshold`
// of its domains' subdomains to phase 3, the regular one otherwise and for
// the first interval.
LowerBoundAlgorithm select_algorithm(const PhaseStats* prev, double threshold);

PipelineResult run_pipeline(const SearchPlan& plan);

// Phase-1 test inputs of every testable domain of a resolved plan, in
// domain order.
template <FracWord Word>
std::vector<SearchProblem<Word>> phase1_problems(const SearchPlan& plan);

}  // namespace hrsearch
