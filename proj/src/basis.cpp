#include "sgam/basis.hpp"

namespace sgam {

std::string to_string(BasisKind kind) { return kind == BasisKind::Cosine ? "cosine" : "haar"; }

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "cosine") return BasisKind::Cosine;
  if (name == "haar") return BasisKind::Haar;
  throw InputError("unknown basis '" + name + "' (expected cosine or haar)");
}

void validate(const BasisSpec& spec) {
  if (spec.m < 1) throw InputError("basis truncation m must be >= 1");
  if (spec.kind == BasisKind::Haar && spec.m > (Index{1} << 30))
    throw InputError("haar truncation too large");
}

}  // namespace sgam
