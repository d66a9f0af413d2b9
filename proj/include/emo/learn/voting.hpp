#pragma once

#include <span>
#include <vector>

#include "emo/learn/classifier.hpp"

namespace emo {

// Elementwise strict majority of the members' bits; ties go to 0.
LabelMatrix majority_vote(std::span<const LabelMatrix> votes);

// Hard-majority ensemble over independently trained members.
class Voting final : public Model {
 public:
  // Member i is trained with its own spec, its seed replaced by the i-th draw
  // from a generator seeded with `seed`.
  static Voting fit(const std::vector<ClassifierSpec>& members, const FeatureMatrix& x, const LabelMatrix& y,
                    std::uint64_t seed);

  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static Voting load(BinaryReader& r);

  const std::vector<FittedClassifier>& members() const noexcept { return members_; }

 private:
  std::vector<FittedClassifier> members_;
};

}  // namespace emo
