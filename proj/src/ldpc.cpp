#include "smsim/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smsim/rng.hpp"

namespace smsim {

namespace {

constexpr int kVarDegree = 3;

// dense GF(2) rows as packed words
struct BitRows {
  int cols, words;
  std::vector<std::uint64_t> data;
  BitRows(int rows, int cols) : cols(cols), words((cols + 63) / 64), data(rows * words, 0) {}
  std::uint64_t* row(int r) { return data.data() + static_cast<std::size_t>(r) * words; }
  const std::uint64_t* row(int r) const { return data.data() + static_cast<std::size_t>(r) * words; }
  void set(int r, int c) { row(r)[c >> 6] ^= (1ULL << (c & 63)); }
  bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1ULL; }
  void xor_rows(int dst, int src) {
    auto* d = row(dst);
    const auto* s = row(src);
    for (int w = 0; w < words; ++w) d[w] ^= s[w];
  }
  void swap_rows(int a, int b) {
    if (a == b) return;
    auto* pa = row(a);
    auto* pb = row(b);
    for (int w = 0; w < words; ++w) std::swap(pa[w], pb[w]);
  }
};

std::vector<std::vector<int>> peg_grow(int n, int n_chk, int chk_degree, std::uint64_t seed) {
  Splitmix tie(seed);
  std::vector<std::vector<int>> var_chks(n), chk_vars(n_chk);
  std::vector<int> chk_deg(n_chk, 0);
  std::vector<int> seen_chk(n_chk, -1), seen_var(n, -1);
  std::vector<int> frontier, next_frontier, candidates;

  auto pick = [&](const std::vector<int>& cands) {
    int best = chk_degree + 1;
    for (int c : cands) best = std::min(best, chk_deg[c]);
    candidates.clear();
    for (int c : cands)
      if (chk_deg[c] == best) candidates.push_back(c);
    return candidates[tie.below(candidates.size())];
  };

  std::vector<int> open;
  for (int v = 0; v < n; ++v) {
    for (int e = 0; e < kVarDegree; ++e) {
      int chosen;
      if (e == 0) {
        open.clear();
        for (int c = 0; c < n_chk; ++c)
          if (chk_deg[c] < chk_degree) open.push_back(c);
        chosen = pick(open);
      } else {
        // breadth-first expansion of v's neighborhood over the partial graph
        int stamp = v * kVarDegree + e;
        seen_var[v] = stamp;
        frontier.clear();
        for (int c : var_chks[v]) {
          seen_chk[c] = stamp;
          frontier.push_back(c);
        }
        while (true) {
          next_frontier.clear();
          for (int c : frontier)
            for (int v2 : chk_vars[c]) {
              if (seen_var[v2] == stamp) continue;
              seen_var[v2] = stamp;
              for (int c2 : var_chks[v2])
                if (seen_chk[c2] != stamp) {
                  seen_chk[c2] = stamp;
                  next_frontier.push_back(c2);
                }
            }
          if (next_frontier.empty()) break;
          std::swap(frontier, next_frontier);
        }
        open.clear();
        for (int c = 0; c < n_chk; ++c)
          if (seen_chk[c] != stamp && chk_deg[c] < chk_degree) open.push_back(c);
        if (open.empty())  // whole graph reachable: take the deepest layer
          for (int c : frontier)
            if (chk_deg[c] < chk_degree) open.push_back(c);
        if (open.empty())
          for (int c = 0; c < n_chk; ++c)
            if (chk_deg[c] < chk_degree) open.push_back(c);
        chosen = pick(open);
      }
      var_chks[v].push_back(chosen);
      chk_vars[chosen].push_back(v);
      ++chk_deg[chosen];
    }
  }
  return chk_vars;
}

BitRows adjacency_to_rows(const std::vector<std::vector<int>>& chk_vars, int n) {
  BitRows h(static_cast<int>(chk_vars.size()), n);
  for (int c = 0; c < static_cast<int>(chk_vars.size()); ++c)
    for (int v : chk_vars[c]) h.set(c, v);
  return h;
}

int gf2_rank(BitRows h, int n) {
  int rank = 0;
  int rows = static_cast<int>(h.data.size() / h.words);
  for (int col = 0; col < n && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (h.get(r, col)) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    h.swap_rows(rank, piv);
    for (int r = 0; r < rows; ++r)
      if (r != rank && h.get(r, col)) h.xor_rows(r, rank);
    ++rank;
  }
  return rank;
}

}  // namespace

void LdpcCode::set_max_iterations(int it) {
  if (it <= 0) throw std::invalid_argument("max_iterations must be positive");
  max_iterations_ = it;
}

void LdpcCode::build_var_adjacency() {
  var_chks_.assign(n_, {});
  for (int c = 0; c < n_checks(); ++c)
    for (int v : chk_vars_[c]) var_chks_[v].push_back(c);
}

LdpcCode LdpcCode::make_regular(int k, int n, std::uint64_t seed) {
  if (n != 2 * k || k <= 0) throw std::invalid_argument("code must have n = 2k, k > 0");
  int n_chk = n - k;
  if ((n * kVarDegree) % n_chk != 0)
    throw std::invalid_argument("check degree is not integral for these dimensions");
  int chk_degree = n * kVarDegree / n_chk;

  // regrow with a remixed seed in the unlikely case of a rank defect
  std::uint64_t s = seed;
  for (int attempt = 0; attempt < 32; ++attempt) {
    auto chk_vars = peg_grow(n, n_chk, chk_degree, s);
    if (gf2_rank(adjacency_to_rows(chk_vars, n), n) == n_chk) {
      LdpcCode code;
      code.n_ = n;
      code.k_ = k;
      code.seed_ = seed;
      code.chk_vars_ = std::move(chk_vars);
      code.finish_construction();
      return code;
    }
    s = splitmix64(s);
  }
  throw std::runtime_error("could not grow a full-rank parity-check matrix");
}

// Arrange columns so the parity block (last n-k columns) is invertible, then
// precompute the parity generator rows.
void LdpcCode::finish_construction() {
  int m = n_checks();
  BitRows h = adjacency_to_rows(chk_vars_, n_);

  // eliminate preferring high column indices as pivots
  std::vector<char> is_pivot(n_, 0);
  {
    BitRows work = h;
    int rank = 0;
    for (int col = n_ - 1; col >= 0 && rank < m; --col) {
      int piv = -1;
      for (int r = rank; r < m; ++r)
        if (work.get(r, col)) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      work.swap_rows(rank, piv);
      for (int r = 0; r < m; ++r)
        if (r != rank && work.get(r, col)) work.xor_rows(r, rank);
      is_pivot[col] = 1;
      ++rank;
    }
    if (rank != m) throw std::runtime_error("parity-check matrix lost rank during arrangement");
  }

  // new order: message positions first, pivot (parity) positions last
  std::vector<int> new_pos(n_);
  int mi = 0, pi = k_;
  for (int col = 0; col < n_; ++col) new_pos[col] = is_pivot[col] ? pi++ : mi++;
  for (auto& row : chk_vars_) {
    for (int& v : row) v = new_pos[v];
    std::sort(row.begin(), row.end());
  }
  build_var_adjacency();

  // invert the parity block: gauss-jordan on [B | I]
  int pw = (m + 63) / 64;
  BitRows b(m, m), binv(m, m);
  for (int c = 0; c < m; ++c)
    for (int v : chk_vars_[c])
      if (v >= k_) b.set(c, v - k_);
  for (int r = 0; r < m; ++r) binv.set(r, r);
  for (int col = 0; col < m; ++col) {
    int piv = -1;
    for (int r = col; r < m; ++r)
      if (b.get(r, col)) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("parity block is singular");
    b.swap_rows(col, piv);
    binv.swap_rows(col, piv);
    for (int r = 0; r < m; ++r)
      if (r != col && b.get(r, col)) {
        b.xor_rows(r, col);
        binv.xor_rows(r, col);
      }
  }

  // parity rows: E  =  Binv * A  (A = message columns of H)
  msg_words_ = (k_ + 63) / 64;
  BitRows a(m, k_);
  for (int c = 0; c < m; ++c)
    for (int v : chk_vars_[c])
      if (v < k_) a.set(c, v);
  parity_rows_.assign(static_cast<std::size_t>(m) * msg_words_, 0);
  for (int i = 0; i < m; ++i) {
    auto* out = parity_rows_.data() + static_cast<std::size_t>(i) * msg_words_;
    for (int w = 0; w < pw; ++w) {
      std::uint64_t bits = binv.row(i)[w];
      while (bits) {
        int j = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        const auto* arow = a.row(j);
        for (int t = 0; t < msg_words_; ++t) out[t] ^= arow[t];
      }
    }
  }
}

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> message) const {
  if (static_cast<int>(message.size()) != k_)
    throw std::invalid_argument("message length mismatch: expected " + std::to_string(k_) +
                                ", got " + std::to_string(message.size()));
  std::vector<std::uint64_t> mw(msg_words_, 0);
  for (int j = 0; j < k_; ++j)
    if (message[j] & 1) mw[j >> 6] |= (1ULL << (j & 63));

  std::vector<std::uint8_t> cw(n_);
  for (int j = 0; j < k_; ++j) cw[j] = message[j] & 1;
  int m = n_checks();
  for (int i = 0; i < m; ++i) {
    const auto* row = parity_rows_.data() + static_cast<std::size_t>(i) * msg_words_;
    std::uint64_t acc = 0;
    for (int w = 0; w < msg_words_; ++w) acc ^= row[w] & mw[w];
    cw[k_ + i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return cw;
}

bool LdpcCode::parity_ok(std::span<const std::uint8_t> codeword) const {
  if (static_cast<int>(codeword.size()) != n_)
    throw std::invalid_argument("codeword length mismatch");
  for (const auto& row : chk_vars_) {
    int s = 0;
    for (int v : row) s ^= codeword[v] & 1;
    if (s) return false;
  }
  return true;
}

void LdpcCode::save_alist(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  int m = n_checks();
  std::size_t max_dv = 0, max_dc = 0;
  for (const auto& a : var_chks_) max_dv = std::max(max_dv, a.size());
  for (const auto& a : chk_vars_) max_dc = std::max(max_dc, a.size());
  out << n_ << ' ' << m << '\n' << max_dv << ' ' << max_dc << '\n';
  for (int v = 0; v < n_; ++v) out << var_chks_[v].size() << (v + 1 < n_ ? ' ' : '\n');
  for (int c = 0; c < m; ++c) out << chk_vars_[c].size() << (c + 1 < m ? ' ' : '\n');
  for (const auto& a : var_chks_) {
    for (std::size_t i = 0; i < a.size(); ++i) out << a[i] + 1 << (i + 1 < a.size() ? ' ' : '\n');
  }
  for (const auto& a : chk_vars_) {
    for (std::size_t i = 0; i < a.size(); ++i) out << a[i] + 1 << (i + 1 < a.size() ? ' ' : '\n');
  }
}

LdpcCode LdpcCode::from_alist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  int n, m, max_dv, max_dc;
  if (!(in >> n >> m >> max_dv >> max_dc)) throw std::runtime_error("malformed alist header");
  if (n <= 0 || m <= 0 || m >= n) throw std::runtime_error("bad alist dimensions");
  std::vector<int> dv(n), dc(m);
  for (auto& d : dv) in >> d;
  for (auto& d : dc) in >> d;
  std::vector<std::vector<int>> var_chks(n), chk_vars(m);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < dv[v]; ++i) {
      int c;
      in >> c;
      if (c < 1 || c > m) throw std::runtime_error("alist check index out of range");
      var_chks[v].push_back(c - 1);
    }
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < dc[c]; ++i) {
      int v;
      in >> v;
      if (v < 1 || v > n) throw std::runtime_error("alist variable index out of range");
      chk_vars[c].push_back(v - 1);
    }
  if (!in) throw std::runtime_error("truncated alist file");
  for (int c = 0; c < m; ++c)
    for (int v : chk_vars[c])
      if (std::find(var_chks[v].begin(), var_chks[v].end(), c) == var_chks[v].end())
        throw std::runtime_error("alist adjacency lists disagree");

  LdpcCode code;
  code.n_ = n;
  code.k_ = n - m;
  code.chk_vars_ = std::move(chk_vars);
  code.finish_construction();
  return code;
}

BpDecoder::BpDecoder(const LdpcCode& code) : code_(&code) {
  int n = code.n(), m = code.n_checks();
  std::vector<int> var_edge_base(n + 1, 0);
  for (int v = 0; v < n; ++v)
    var_edge_base[v + 1] = var_edge_base[v] + static_cast<int>(code.var_neighbors(v).size());
  int n_edges = var_edge_base[n];

  chk_degree_offsets_.assign(m + 1, 0);
  for (int c = 0; c < m; ++c)
    chk_degree_offsets_[c + 1] =
        chk_degree_offsets_[c] + static_cast<int>(code.check_neighbors(c).size());
  chk_edges_.assign(n_edges, 0);
  std::vector<int> cursor(n, 0);
  // walk checks, claiming each variable's next edge slot
  std::vector<int> fill(m, 0);
  for (int v = 0; v < n; ++v)
    for (int c : code.var_neighbors(v)) {
      int slot = chk_degree_offsets_[c] + fill[c]++;
      chk_edges_[slot] = var_edge_base[v] + cursor[v]++;
    }

  v2c_.assign(n_edges, 0.0);
  c2v_.assign(n_edges, 0.0);
  posterior_.assign(n, 0.0);
  hard_.assign(n, 0);
}

DecodeResult BpDecoder::decode(std::span<const double> llrs) {
  const LdpcCode& code = *code_;
  int n = code.n(), m = code.n_checks();
  if (static_cast<int>(llrs.size()) != n)
    throw std::invalid_argument("llr length mismatch: expected " + std::to_string(n) + ", got " +
                                std::to_string(llrs.size()));
  for (double l : llrs)
    if (!std::isfinite(l)) throw std::invalid_argument("non-finite llr");

  constexpr double kMaxProd = 1.0 - 1e-12;
  int e = 0;
  for (int v = 0; v < n; ++v)
    for (std::size_t d = 0; d < code.var_neighbors(v).size(); ++d) v2c_[e++] = llrs[v];
  std::fill(c2v_.begin(), c2v_.end(), 0.0);

  double t[64], pre[65], suf[65];
  int iterations = 0;
  bool converged = false;
  for (int it = 1; it <= code.max_iterations(); ++it) {
    iterations = it;
    for (int c = 0; c < m; ++c) {
      int lo = chk_degree_offsets_[c], hi = chk_degree_offsets_[c + 1];
      int deg = hi - lo;
      for (int i = 0; i < deg; ++i) {
        double x = std::clamp(v2c_[chk_edges_[lo + i]], -38.0, 38.0);
        t[i] = std::tanh(0.5 * x);
      }
      pre[0] = 1.0;
      for (int i = 0; i < deg; ++i) pre[i + 1] = pre[i] * t[i];
      suf[deg] = 1.0;
      for (int i = deg - 1; i >= 0; --i) suf[i] = suf[i + 1] * t[i];
      for (int i = 0; i < deg; ++i) {
        double p = std::clamp(pre[i] * suf[i + 1], -kMaxProd, kMaxProd);
        c2v_[chk_edges_[lo + i]] = 2.0 * std::atanh(p);
      }
    }

    e = 0;
    for (int v = 0; v < n; ++v) {
      double sum = llrs[v];
      int deg = static_cast<int>(code.var_neighbors(v).size());
      for (int d = 0; d < deg; ++d) sum += c2v_[e + d];
      posterior_[v] = sum;
      hard_[v] = sum < 0.0 ? 1 : 0;
      for (int d = 0; d < deg; ++d) v2c_[e + d] = sum - c2v_[e + d];
      e += deg;
    }

    bool parity = true;
    for (int c = 0; c < m && parity; ++c) {
      int s = 0;
      for (int v : code.check_neighbors(c)) s ^= hard_[v];
      parity = (s == 0);
    }
    if (parity) {
      bool informative = true;
      for (int v = 0; v < n; ++v)
        if (posterior_[v] == 0.0) {
          informative = false;
          break;
        }
      if (informative) {
        converged = true;
        break;
      }
      bool all_zero = std::all_of(posterior_.begin(), posterior_.end(),
                                  [](double p) { return p == 0.0; });
      if (all_zero) break;  // nothing to iterate on
    }
  }

  DecodeResult res;
  res.message.assign(hard_.begin(), hard_.begin() + code.k());
  res.converged = converged;
  res.iterations = iterations;
  return res;
}

}  // namespace smsim
