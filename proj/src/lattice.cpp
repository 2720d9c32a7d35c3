#include "pvbs/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <queue>
#include <sstream>

#include "pvbs/errors.hpp"

namespace pvbs {

namespace {

bool bfs_connected(const std::vector<Site>& sites,
                   const std::vector<Edge>& edges) {
  if (sites.empty()) return false;
  std::vector<std::vector<int>> adj(sites.size());
  for (const Edge& e : edges) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  std::vector<char> seen(sites.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  return reached == sites.size();
}

}  // namespace

LatticeRegion::LatticeRegion(int dim, std::vector<Site> sites)
    : dim_(dim), sites_(std::move(sites)) {
  if (dim_ < 1) throw ValidationError("lattice dimension must be >= 1");
  if (sites_.empty()) throw ValidationError("region must be nonempty");
  for (const Site& s : sites_)
    if (static_cast<int>(s.size()) != dim_)
      throw ValidationError("site dimension mismatch");
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end())
    throw ValidationError("duplicate site in region");

  for (int i = 0; i < size(); ++i) {
    Site t = sites_[i];
    for (int k = 0; k < dim_; ++k) {
      ++t[k];
      int j = index_of(t);
      if (j >= 0) edges_.push_back({i, j, k});
      --t[k];
    }
  }
  connected_ = bfs_connected(sites_, edges_);
}

int LatticeRegion::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return -1;
  return static_cast<int>(it - sites_.begin());
}

LatticeRegion make_box(const std::vector<int>& N) {
  if (N.empty()) throw ValidationError("box extents must be nonempty");
  for (int n : N)
    if (n < 0) throw ValidationError("box extents must be >= 0");
  int d = static_cast<int>(N.size());
  std::vector<Site> sites;
  Site s(d, 0);
  while (true) {
    sites.push_back(s);
    int k = d - 1;
    while (k >= 0 && s[k] == N[k]) s[k--] = 0;
    if (k < 0) break;
    ++s[k];
  }
  return LatticeRegion(d, std::move(sites));
}

LatticeRegion make_centered_box(const std::vector<int>& N) {
  if (N.empty()) throw ValidationError("box extents must be nonempty");
  for (int n : N)
    if (n < 0) throw ValidationError("box extents must be >= 0");
  int d = static_cast<int>(N.size());
  std::vector<Site> sites;
  Site s(d);
  for (int k = 0; k < d; ++k) s[k] = -N[k];
  while (true) {
    sites.push_back(s);
    int k = d - 1;
    while (k >= 0 && s[k] == N[k]) s[k] = -N[k], --k;
    if (k < 0) break;
    ++s[k];
  }
  return LatticeRegion(d, std::move(sites));
}

int DiamondRegion::count(DiamondClass c) const {
  int n = 0;
  for (DiamondClass x : classes)
    if (x == c) ++n;
  return n;
}

DiamondRegion make_diamond(int L, bool require_odd_half) {
  if (L <= 0 || L % 2 != 0) throw ValidationError("diamond L must be even and positive");
  if (require_odd_half && (L / 2) % 2 == 0)
    throw ValidationError("diamond L/2 must be odd");
  int h = L / 2;
  std::vector<Site> sites;
  for (int x = -h; x <= L + h; ++x)
    for (int y = -h; y <= L + h; ++y) {
      int s = x + y, t = x - y;
      if (s >= 0 && s <= L && std::abs(t) <= h) sites.push_back({x, y});
    }
  DiamondRegion dr{L, LatticeRegion(2, std::move(sites)), {}};
  dr.classes.reserve(dr.region.size());
  for (const Site& p : dr.region.sites()) {
    int s = p[0] + p[1], t = p[0] - p[1];
    // For L/2 odd no site lies on two lines; otherwise the first match wins.
    DiamondClass c = DiamondClass::interior;
    if (s == 0)
      c = DiamondClass::edge;
    else if (s == L)
      c = DiamondClass::opp;
    else if (t == -h)
      c = DiamondClass::uside;
    else if (t == h)
      c = DiamondClass::lside;
    dr.classes.push_back(c);
  }
  return dr;
}

std::vector<Site> enlarge(const std::vector<Site>& X, int l,
                          const LatticeRegion& ambient) {
  if (l < 0) throw ValidationError("enlarge radius must be >= 0");
  if (X.empty()) throw ValidationError("enlarge needs a nonempty site set");
  for (const Site& x : X)
    if (!ambient.contains(x))
      throw ValidationError("enlarge: X not contained in ambient region");
  std::vector<Site> out;
  for (const Site& y : ambient.sites()) {
    int best = l + 1;
    for (const Site& x : X) {
      int d = 0;
      for (int k = 0; k < ambient.dim() && d <= l; ++k)
        d += std::abs(y[k] - x[k]);
      best = std::min(best, d);
      if (best == 0) break;
    }
    if (best <= l) out.push_back(y);
  }
  return out;
}

LatticeRegion load_site_list(std::istream& in) {
  std::vector<Site> sites;
  int dim = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Site s;
    int v;
    while (ls >> v) s.push_back(v);
    if (!ls.eof())
      throw ValidationError("site list: bad token on line " + std::to_string(lineno));
    if (s.empty()) continue;
    if (dim < 0) dim = static_cast<int>(s.size());
    if (static_cast<int>(s.size()) != dim)
      throw ValidationError("site list: dimension mismatch on line " + std::to_string(lineno));
    sites.push_back(std::move(s));
  }
  if (dim < 0) throw ValidationError("site list: no sites");
  return LatticeRegion(dim, std::move(sites));
}

LatticeRegion load_site_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open site list: " + path);
  return load_site_list(in);
}

void write_site_list(std::ostream& out, const LatticeRegion& region) {
  for (const Site& s : region.sites()) {
    for (int k = 0; k < region.dim(); ++k) {
      if (k) out << ' ';
      out << s[k];
    }
    out << '\n';
  }
}

}  // namespace pvbs
