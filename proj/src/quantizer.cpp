#include "genval/quantizer.hpp"

#include "genval/errors.hpp"
#include "genval/parallel.hpp"
#include "genval/rng.hpp"

#include <limits>
#include <string>

namespace genval {

namespace {

inline double sqdist(const float* a, const float* b, Index d) {
  double acc = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return acc;
}

// Nearest row of `centroids` to `x`; ties go to the lowest index.
inline Index nearest_centroid(const float* x, const RowMatrix<float>& centroids, double* best_out) {
  const Index d = centroids.cols();
  Index best = 0;
  double best_dist = sqdist(x, centroids.data(), d);
  for (Index c = 1; c < centroids.rows(); ++c) {
    const double dist = sqdist(x, centroids.data() + c * d, d);
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  if (best_out) *best_out = best_dist;
  return best;
}

void check_dim(const EmbeddingMatrix& data, const Codebook& codebook) {
  if (data.cols() != codebook.dim()) {
    throw ValidationError("dimension mismatch: data dim " + std::to_string(data.cols()) +
                          " vs codebook dim " + std::to_string(codebook.dim()));
  }
}

}  // namespace

void PQConfig::validate(Index dim, Index count) const {
  if (num_subspaces < 1) throw ConfigError("num_subspaces must be positive");
  if (dim % num_subspaces != 0) {
    throw ConfigError("dim " + std::to_string(dim) + " is not divisible by num_subspaces " +
                      std::to_string(num_subspaces));
  }
  if (codebook_size < 1 || codebook_size > 65536) {
    throw ConfigError("codebook_size must be in [1, 65536], got " + std::to_string(codebook_size));
  }
  if (codebook_size > count) {
    throw ConfigError("codebook_size " + std::to_string(codebook_size) + " exceeds training count " +
                      std::to_string(count));
  }
  if (kmeans_iters < 1) throw ConfigError("kmeans_iters must be positive");
}

RowMatrix<float> kmeans(const RowMatrix<float>& data, Index k, int iters, std::uint64_t seed,
                        std::vector<double>* objective) {
  const Index n = data.rows();
  const Index d = data.cols();
  if (k < 1 || k > n) throw ConfigError("k-means needs 1 <= k <= n");
  Rng rng(seed);
  RowMatrix<float> centroids(k, d);

  // k-means++ seeding: next centroid drawn with probability proportional to
  // the squared distance to the nearest centroid chosen so far.
  std::vector<double> nearest(static_cast<std::size_t>(n));
  Index pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
  centroids.row(0) = data.row(pick);
  for (Index i = 0; i < n; ++i) nearest[i] = sqdist(data.row(i).data(), centroids.row(0).data(), d);
  for (Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : nearest) total += v;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      pick = -1;
      for (Index i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        cumulative += nearest[i];
        pick = i;
        if (cumulative > target) break;
      }
    } else {
      // Every point already coincides with a centroid.
      pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = data.row(pick);
    for (Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sqdist(data.row(i).data(), centroids.row(c).data(), d));
    }
  }

  std::vector<Index> assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  RowMatrix<double> sums(k, d);
  std::vector<Index> counts(static_cast<std::size_t>(k));
  double previous = std::numeric_limits<double>::infinity();

  for (int it = 0; it < iters; ++it) {
    bool changed = false;
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      const Index best = nearest_centroid(data.row(i).data(), centroids, &dist[i]);
      if (best != assign[i]) changed = true;
      assign[i] = best;
      total += dist[i];
    }
    if (objective) objective->push_back(total);
    if (total > previous * (1.0 + 1e-9) + 1e-12) {
      throw InternalError("k-means objective increased from " + std::to_string(previous) + " to " +
                          std::to_string(total) + " at iteration " + std::to_string(it));
    }
    previous = total;
    if (!changed) break;

    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += data.row(i).cast<double>();
      ++counts[assign[i]];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids.row(c) = (sums.row(c) / static_cast<double>(counts[c])).cast<float>();
    }
    for (Index i = 0; i < n; ++i) {
      dist[i] = sqdist(data.row(i).data(), centroids.row(assign[i]).data(), d);
    }
    // Orphaned centroids jump to the point farthest from its own centroid.
    for (Index c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      Index far = 0;
      for (Index i = 1; i < n; ++i) {
        if (dist[i] > dist[far]) far = i;
      }
      centroids.row(c) = data.row(far);
      dist[far] = 0.0;
    }
  }
  return centroids;
}

Codebook train_codebooks(const EmbeddingMatrix& data, const PQConfig& cfg, int threads,
                         KMeansTrace* trace) {
  cfg.validate(data.cols(), data.rows());
  const Index m = cfg.num_subspaces;
  const Index dsub = data.cols() / m;
  Codebook codebook;
  codebook.centroids.resize(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> objectives(static_cast<std::size_t>(m));
  parallel_for(m, threads, [&](Index s) {
    const RowMatrix<float> sub = data.middleCols(s * dsub, dsub);
    codebook.centroids[s] = kmeans(sub, cfg.codebook_size, cfg.kmeans_iters,
                                   derive_seed(cfg.seed, static_cast<std::uint64_t>(s)), &objectives[s]);
  });
  if (trace) {
    trace->iterations.clear();
    for (const auto& obj : objectives) trace->iterations.push_back(static_cast<int>(obj.size()));
    trace->objective = std::move(objectives);
  }
  return codebook;
}

PQCodes encode(const EmbeddingMatrix& data, const Codebook& codebook) {
  check_dim(data, codebook);
  const Index m = codebook.num_subspaces();
  const Index dsub = codebook.subspace_dim();
  PQCodes codes(data.rows(), m);
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index s = 0; s < m; ++s) {
      codes(i, s) = static_cast<std::uint16_t>(
          nearest_centroid(data.row(i).data() + s * dsub, codebook.centroids[s], nullptr));
    }
  }
  return codes;
}

void validate_codes(const PQCodes& codes, const Codebook& codebook) {
  if (codes.cols() != codebook.num_subspaces()) {
    throw CorruptionError("code width " + std::to_string(codes.cols()) + " does not match " +
                          std::to_string(codebook.num_subspaces()) + " subspaces");
  }
  const Index ks = codebook.codebook_size();
  for (Index i = 0; i < codes.rows(); ++i) {
    for (Index s = 0; s < codes.cols(); ++s) {
      if (codes(i, s) >= ks) {
        throw CorruptionError("code " + std::to_string(codes(i, s)) + " at (row " + std::to_string(i) +
                              ", subspace " + std::to_string(s) + ") exceeds codebook size " +
                              std::to_string(ks));
      }
    }
  }
}

EmbeddingMatrix decode(const PQCodes& codes, const Codebook& codebook) {
  validate_codes(codes, codebook);
  const Index dsub = codebook.subspace_dim();
  EmbeddingMatrix out(codes.rows(), codebook.dim());
  for (Index i = 0; i < codes.rows(); ++i) {
    for (Index s = 0; s < codes.cols(); ++s) {
      out.row(i).segment(s * dsub, dsub) = codebook.centroids[s].row(codes(i, s));
    }
  }
  return out;
}

double quantization_error(const EmbeddingMatrix& data, const Codebook& codebook) {
  check_dim(data, codebook);
  if (data.rows() == 0) return 0.0;
  const Index dsub = codebook.subspace_dim();
  double total = 0.0;
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index s = 0; s < codebook.num_subspaces(); ++s) {
      double best = 0.0;
      nearest_centroid(data.row(i).data() + s * dsub, codebook.centroids[s], &best);
      total += best;
    }
  }
  return total / static_cast<double>(data.rows());
}

}  // namespace genval
