#include "richards/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>

namespace richards {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> entries) {
  if (n < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
  }
  // Stable sort keeps duplicate summation order independent of the input
  // permutation of distinct keys only; within a key, insertion order.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  SparseMatrix m;
  m.n_ = n;
  m.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t i = 0;
  for (int row = 0; row < n; ++row) {
    while (i < entries.size() && entries[i].row == row) {
      int col = entries[i].col;
      double sum = 0.0;
      while (i < entries.size() && entries[i].row == row && entries[i].col == col) {
        sum += entries[i].value;
        ++i;
      }
      m.col_indices_.push_back(col);
      m.values_.push_back(sum);
    }
    m.row_offsets_[static_cast<std::size_t>(row) + 1] = static_cast<int>(m.col_indices_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& a) {
  int n = static_cast<int>(a.size());
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(a[i].size()) != n)
      throw std::invalid_argument("SparseMatrix::from_dense: not square");
    for (int j = 0; j < n; ++j)
      if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
  }
  return from_triplets(n, std::move(t));
}

double SparseMatrix::coeff(int row, int col) const {
  if (row < 0 || row >= n_ || col < 0 || col >= n_)
    throw std::out_of_range("SparseMatrix::coeff");
  const int* begin = col_indices_.data() + row_offsets_[row];
  const int* end = col_indices_.data() + row_offsets_[row + 1];
  const int* it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.data())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
  for (int row = 0; row < n_; ++row) {
    double s = 0.0;
    for (int p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p)
      s += values_[p] * x[static_cast<std::size_t>(col_indices_[p])];
    y[static_cast<std::size_t>(row)] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
  for (int row = 0; row < n_; ++row) {
    double xr = x[static_cast<std::size_t>(row)];
    for (int p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p)
      y[static_cast<std::size_t>(col_indices_[p])] += values_[p] * xr;
  }
  return y;
}

double SparseMatrix::norm1() const {
  std::vector<double> colsum(static_cast<std::size_t>(n_), 0.0);
  for (std::size_t p = 0; p < values_.size(); ++p)
    colsum[static_cast<std::size_t>(col_indices_[p])] += std::abs(values_[p]);
  double m = 0.0;
  for (double c : colsum) m = std::max(m, c);
  return m;
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (int row = 0; row < n_; ++row) {
    double s = 0.0;
    for (int p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p)
      s += std::abs(values_[p]);
    m = std::max(m, s);
  }
  return m;
}

double SparseMatrix::max_asymmetry() const {
  SparseMatrix t = transposed();
  double m = 0.0;
  for (int row = 0; row < n_; ++row)
    for (int p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p)
      m = std::max(m, std::abs(values_[p] - t.coeff(row, col_indices_[p])));
  return m;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.n_ = n_;
  t.row_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  t.col_indices_.resize(values_.size());
  t.values_.resize(values_.size());
  for (std::size_t p = 0; p < values_.size(); ++p) t.row_offsets_[col_indices_[p] + 1]++;
  for (int i = 0; i < n_; ++i) t.row_offsets_[i + 1] += t.row_offsets_[i];
  std::vector<int> next(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
  for (int row = 0; row < n_; ++row) {
    for (int p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p) {
      int q = next[col_indices_[p]]++;
      t.col_indices_[q] = row;
      t.values_[q] = values_[p];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::linear_combination(double alpha, const SparseMatrix& a,
                                              double beta, const SparseMatrix& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("SparseMatrix::linear_combination: size mismatch");
  SparseMatrix c;
  c.n_ = a.n_;
  c.row_offsets_.assign(1, 0);
  c.row_offsets_.reserve(static_cast<std::size_t>(a.n_) + 1);
  for (int row = 0; row < a.n_; ++row) {
    int pa = a.row_offsets_[row], ea = a.row_offsets_[row + 1];
    int pb = b.row_offsets_[row], eb = b.row_offsets_[row + 1];
    while (pa < ea || pb < eb) {
      int ca = pa < ea ? a.col_indices_[pa] : a.n_;
      int cb = pb < eb ? b.col_indices_[pb] : a.n_;
      if (ca < cb) {
        c.col_indices_.push_back(ca);
        c.values_.push_back(alpha * a.values_[pa++]);
      } else if (cb < ca) {
        c.col_indices_.push_back(cb);
        c.values_.push_back(beta * b.values_[pb++]);
      } else {
        c.col_indices_.push_back(ca);
        c.values_.push_back(alpha * a.values_[pa++] + beta * b.values_[pb++]);
      }
    }
    c.row_offsets_.push_back(static_cast<int>(c.col_indices_.size()));
  }
  return c;
}

namespace {

struct Csc {
  std::vector<int> colptr, rows;
  std::vector<double> vals;
};

Csc to_csc(const SparseMatrix& a) {
  Csc c;
  int n = a.size();
  c.colptr.assign(static_cast<std::size_t>(n) + 1, 0);
  c.rows.resize(a.nnz());
  c.vals.resize(a.nnz());
  auto rp = a.row_offsets();
  auto ci = a.col_indices();
  auto vx = a.values();
  for (std::size_t p = 0; p < vx.size(); ++p) c.colptr[ci[p] + 1]++;
  for (int j = 0; j < n; ++j) c.colptr[j + 1] += c.colptr[j];
  std::vector<int> next(c.colptr.begin(), c.colptr.end() - 1);
  for (int row = 0; row < n; ++row) {
    for (int p = rp[row]; p < rp[row + 1]; ++p) {
      int q = next[ci[p]]++;
      c.rows[q] = row;  // rows appear in increasing order per column
      c.vals[q] = vx[p];
    }
  }
  return c;
}

// Adjacency of the symmetrized pattern, self-loops removed.
std::vector<std::vector<int>> symmetric_adjacency(const SparseMatrix& a) {
  int n = a.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  auto rp = a.row_offsets();
  auto ci = a.col_indices();
  for (int row = 0; row < n; ++row) {
    for (int p = rp[row]; p < rp[row + 1]; ++p) {
      int col = ci[p];
      if (col == row) continue;
      adj[row].push_back(col);
      adj[col].push_back(row);
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

}  // namespace

std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a) {
  int n = a.size();
  auto adj = symmetric_adjacency(a);
  std::vector<int> degree(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) degree[i] = static_cast<int>(adj[i].size());

  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));

  auto bfs_levels = [&](int root, std::vector<int>& last_level) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> level = {root}, next;
    seen[root] = 1;
    int depth = 0;
    last_level = level;
    while (!level.empty()) {
      next.clear();
      for (int u : level)
        for (int v : adj[u])
          if (!seen[v] && !visited[v]) {
            seen[v] = 1;
            next.push_back(v);
          }
      if (next.empty()) break;
      last_level = next;
      level.swap(next);
      ++depth;
    }
    return depth;
  };

  for (int start = 0; start < n; ++start) {
    if (visited[start]) continue;
    // Pseudo-peripheral root: min-degree node of the component, then walk to
    // the far level a couple of times.
    int root = start;
    {
      std::vector<int> last;
      int depth = bfs_levels(root, last);
      for (int pass = 0; pass < 2; ++pass) {
        int best = last.front();
        for (int v : last)
          if (degree[v] < degree[best] || (degree[v] == degree[best] && v < best)) best = v;
        std::vector<int> last2;
        int d2 = bfs_levels(best, last2);
        if (d2 <= depth) break;
        depth = d2;
        root = best;
        last = last2;
      }
    }
    std::queue<int> q;
    q.push(root);
    visited[root] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      order.push_back(u);
      std::vector<int> nbs;
      for (int v : adj[u])
        if (!visited[v]) nbs.push_back(v);
      std::sort(nbs.begin(), nbs.end(), [&](int x, int y) {
        return degree[x] != degree[y] ? degree[x] < degree[y] : x < y;
      });
      for (int v : nbs) {
        visited[v] = 1;
        q.push(v);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

LuFactorization LuFactorization::compute(const SparseMatrix& a) {
  int n = a.size();
  if (n == 0) throw std::invalid_argument("LuFactorization: empty matrix");
  LuFactorization f;
  f.n_ = n;
  f.col_order_ = reverse_cuthill_mckee(a);
  f.pivot_row_.assign(static_cast<std::size_t>(n), -1);

  Csc c = to_csc(a);
  const double pivot_floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.norm1();

  std::size_t reserve = 4 * a.nnz() + static_cast<std::size_t>(n);
  f.l_colptr_.assign(1, 0);
  f.l_rows_.reserve(reserve);
  f.l_vals_.reserve(reserve);
  f.u_colptr_.assign(1, 0);
  f.u_rows_.reserve(reserve);
  f.u_vals_.reserve(reserve);
  f.u_diag_.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<int> pinv(static_cast<std::size_t>(n), -1);  // original row -> pivot step
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<char> marked(static_cast<std::size_t>(n), 0);
  std::vector<int> xi(static_cast<std::size_t>(n));      // topological pattern
  std::vector<int> stack(static_cast<std::size_t>(n));   // DFS node stack
  std::vector<int> pstack(static_cast<std::size_t>(n));  // DFS position stack

  for (int k = 0; k < n; ++k) {
    int col = f.col_order_[k];
    int top = n;

    // Reach: depth-first search from the pattern of A(:, col) through the
    // columns of the partial L (rows are original indices).
    for (int p = c.colptr[col]; p < c.colptr[col + 1]; ++p) {
      int seed = c.rows[p];
      if (marked[seed]) continue;
      int head = 0;
      stack[0] = seed;
      while (head >= 0) {
        int node = stack[head];
        int jcol = pinv[node];
        if (!marked[node]) {
          marked[node] = 1;
          pstack[head] = jcol < 0 ? 0 : f.l_colptr_[jcol];
        }
        bool done = true;
        if (jcol >= 0) {
          int pend = f.l_colptr_[jcol + 1];
          for (int pp = pstack[head]; pp < pend; ++pp) {
            int r = f.l_rows_[pp];
            if (marked[r]) continue;
            pstack[head] = pp;
            stack[++head] = r;
            done = false;
            break;
          }
        }
        if (done) {
          --head;
          xi[--top] = node;
        }
      }
    }

    // Numeric sparse triangular solve x = L \ A(:, col).
    for (int p = c.colptr[col]; p < c.colptr[col + 1]; ++p) x[c.rows[p]] = c.vals[p];
    for (int p = top; p < n; ++p) {
      int node = xi[p];
      int jcol = pinv[node];
      if (jcol < 0) continue;
      double xj = x[node];
      if (xj == 0.0) continue;
      for (int pp = f.l_colptr_[jcol] + 1; pp < f.l_colptr_[jcol + 1]; ++pp)
        x[f.l_rows_[pp]] -= f.l_vals_[pp] * xj;
    }

    // Partial pivot among not-yet-pivotal rows of the pattern.
    int ipiv = -1;
    double amax = -1.0;
    for (int p = top; p < n; ++p) {
      int node = xi[p];
      if (pinv[node] >= 0) continue;
      double av = std::abs(x[node]);
      if (av > amax) {
        amax = av;
        ipiv = node;
      }
    }
    if (ipiv < 0 || amax <= pivot_floor)
      throw SingularMatrixError("sparse LU: zero pivot at column " + std::to_string(k));

    pinv[ipiv] = k;
    f.pivot_row_[k] = ipiv;
    double pivot = x[ipiv];
    f.u_diag_[k] = pivot;

    // U column k: pivotal rows (already in pivot coordinates).
    // L column k: remaining rows, original indices fixed up after the loop.
    f.l_rows_.push_back(ipiv);
    f.l_vals_.push_back(1.0);
    for (int p = top; p < n; ++p) {
      int node = xi[p];
      int j = pinv[node];
      if (node == ipiv) {
        // diagonal handled above
      } else if (j >= 0 && j < k) {
        f.u_rows_.push_back(j);
        f.u_vals_.push_back(x[node]);
      } else {
        f.l_rows_.push_back(node);
        f.l_vals_.push_back(x[node] / pivot);
      }
      x[node] = 0.0;
      marked[node] = 0;
    }
    f.l_colptr_.push_back(static_cast<int>(f.l_rows_.size()));
    f.u_colptr_.push_back(static_cast<int>(f.u_rows_.size()));
  }

  // Map L's row indices into pivot coordinates.
  for (int& r : f.l_rows_) r = pinv[r];
  return f;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("LuFactorization::solve: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) y[k] = b[static_cast<std::size_t>(pivot_row_[k])];
  // Forward: L y = P b (unit diagonal stored first in each column).
  for (int k = 0; k < n_; ++k) {
    double yk = y[k];
    if (yk == 0.0) continue;
    for (int p = l_colptr_[k] + 1; p < l_colptr_[k + 1]; ++p) y[l_rows_[p]] -= l_vals_[p] * yk;
  }
  // Backward: U z = y.
  for (int k = n_ - 1; k >= 0; --k) {
    double zk = y[k] / u_diag_[k];
    y[k] = zk;
    if (zk == 0.0) continue;
    for (int p = u_colptr_[k]; p < u_colptr_[k + 1]; ++p) y[u_rows_[p]] -= u_vals_[p] * zk;
  }
  std::vector<double> xfull(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) xfull[static_cast<std::size_t>(col_order_[j])] = y[j];
  return xfull;
}

std::vector<double> LuFactorization::solve_transpose(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("LuFactorization::solve_transpose: size mismatch");
  std::vector<double> w(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) w[j] = b[static_cast<std::size_t>(col_order_[j])];
  // Forward: U^T v = w (gather along U columns).
  for (int k = 0; k < n_; ++k) {
    double s = w[k];
    for (int p = u_colptr_[k]; p < u_colptr_[k + 1]; ++p) s -= u_vals_[p] * w[u_rows_[p]];
    w[k] = s / u_diag_[k];
  }
  // Backward: L^T y = v (gather along L columns, unit diagonal).
  for (int k = n_ - 1; k >= 0; --k) {
    double s = w[k];
    for (int p = l_colptr_[k] + 1; p < l_colptr_[k + 1]; ++p) s -= l_vals_[p] * w[l_rows_[p]];
    w[k] = s;
  }
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) x[static_cast<std::size_t>(pivot_row_[k])] = w[k];
  return x;
}

double condest_1norm(const LuFactorization& f, const SparseMatrix& a) {
  int n = a.size();
  if (f.size() != n) throw std::invalid_argument("condest_1norm: factor/matrix mismatch");
  if (n == 0) return 0.0;

  auto norm1v = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  };

  std::vector<double> x(static_cast<std::size_t>(n), 1.0 / n);
  double est = 0.0;
  for (int sweep = 0; sweep < 5; ++sweep) {
    std::vector<double> y = f.solve(x);
    est = std::max(est, norm1v(y));
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    std::vector<double> z = f.solve_transpose(xi);
    int jmax = 0;
    double zmax = std::abs(z[0]);
    for (int i = 1; i < n; ++i)
      if (std::abs(z[i]) > zmax) {
        zmax = std::abs(z[i]);
        jmax = i;
      }
    double ztx = 0.0;
    for (int i = 0; i < n; ++i) ztx += z[i] * x[i];
    if (zmax <= ztx) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[jmax] = 1.0;
  }

  // Alternating-sign safeguard; still a lower bound since |v|_1 = 3n/2.
  if (n > 1) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double mag = 1.0 + static_cast<double>(i) / (n - 1);
      v[i] = (i % 2 == 0) ? mag : -mag;
    }
    std::vector<double> y = f.solve(v);
    est = std::max(est, 2.0 * norm1v(y) / (3.0 * n));
  }
  return a.norm1() * est;
}

}  // namespace richards
