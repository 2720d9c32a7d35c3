#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvbs {

// A site is an integer coordinate tuple; its length is the lattice dimension.
using Site = std::vector<int>;

// Oriented nearest-neighbor bond: site(to) == site(from) + e_dir.
struct Edge {
  int from;
  int to;
  int dir;
};

// Finite set of Z^d sites with a deterministic ordering (lexicographic by
// coordinates), the oriented edge list, and cached connectivity.
class LatticeRegion {
 public:
  LatticeRegion(int dim, std::vector<Site> sites);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(sites_.size()); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(int i) const { return sites_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Ordinal of a site in the lexicographic order, -1 if absent.
  int index_of(const Site& s) const;
  bool contains(const Site& s) const { return index_of(s) >= 0; }
  bool connected() const { return connected_; }

 private:
  int dim_;
  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  bool connected_;
};

// Box prod_k [0, N_k]; N_k >= 0.
LatticeRegion make_box(const std::vector<int>& N);

// Centered box prod_k [-N_k, N_k].
LatticeRegion make_centered_box(const std::vector<int>& N);

enum class DiamondClass { interior, edge, opp, uside, lside };

// D_L = {(x,y) : 0 <= x+y <= L, |x-y| <= L/2} with its boundary-line
// classification.  For L = 2k with k odd the four lines are pairwise
// disjoint on lattice points and the five classes partition D_L exactly.
struct DiamondRegion {
  int L;
  LatticeRegion region;
  std::vector<DiamondClass> classes;  // indexed by site ordinal

  int count(DiamondClass c) const;
};

// L must be even and positive; with require_odd_half also L/2 must be odd.
DiamondRegion make_diamond(int L, bool require_odd_half = false);

// X^(l) = {x in ambient : l1-distance(x, X) <= l}.  Distances are measured
// in Z^d, not along paths inside ambient.  X must be contained in ambient.
std::vector<Site> enlarge(const std::vector<Site>& X, int l,
                          const LatticeRegion& ambient);

// Site-list format: one site per line, d whitespace-separated integers,
// '#' starts a comment, blank lines ignored.  Dimension is inferred from
// the first site; duplicates are rejected.
LatticeRegion load_site_list(std::istream& in);
LatticeRegion load_site_list(const std::string& path);

void write_site_list(std::ostream& out, const LatticeRegion& region);

}  // namespace pvbs
