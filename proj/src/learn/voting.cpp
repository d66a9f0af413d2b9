#include "emo/learn/voting.hpp"

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/rng.hpp"

namespace emo {

LabelMatrix majority_vote(std::span<const LabelMatrix> votes) {
  if (votes.empty()) throw ShapeError("majority_vote: no members");
  const std::size_t rows = votes.front().rows();
  const std::size_t cols = votes.front().cols();
  for (const auto& v : votes) {
    if (v.rows() != rows || v.cols() != cols) throw ShapeError("majority_vote: member shapes differ");
  }
  LabelMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::size_t ones = 0;
      for (const auto& v : votes) ones += v(i, j);
      out(i, j) = 2 * ones > votes.size();
    }
  }
  return out;
}

Voting Voting::fit(const std::vector<ClassifierSpec>& members, const FeatureMatrix& x, const LabelMatrix& y,
                   std::uint64_t seed) {
  if (members.empty()) throw ConfigError("voting: needs at least one member");
  Rng rng(seed);
  Voting v;
  for (const auto& spec : members) {
    ClassifierSpec member = spec;
    member.seed = rng();
    v.members_.push_back(emo::fit(member, x, y));
  }
  return v;
}

PredictionMatrix Voting::predict(const FeatureMatrix& x) const {
  std::vector<LabelMatrix> votes;
  votes.reserve(members_.size());
  for (const auto& m : members_) votes.push_back(m.predict(x).labels);
  return {majority_vote(votes), std::nullopt};
}

void Voting::save(BinaryWriter& w) const {
  w.u64(members_.size());
  for (const auto& m : members_) m.save(w);
}

Voting Voting::load(BinaryReader& r) {
  Voting v;
  const std::size_t n = r.length();
  if (n == 0) throw FormatError("voting: no members");
  for (std::size_t i = 0; i < n; ++i) v.members_.push_back(FittedClassifier::load(r));
  return v;
}

}  // namespace emo
