//! Maximum-inner-product search over raw and compressed vectors, and the
//! quality metrics built on it.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;

use crate::codec::{
    decode_vector, dot_decoded, Dataset, DatasetMeta, EncodedVector, NeighborLists,
};
use crate::error::{NvqError, Result};
use crate::nonlinearity::NonlinearityFamily;
use crate::quantizer::{nvq_loss, uniform_loss, Bits};

/// Top-k neighbors of one query, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub ids: Vec<u32>,
    /// Dot products matching `ids`, in descending order.
    pub scores: Vec<f64>,
}

impl QueryResult {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Row-major reconstructions kept in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub d: usize,
    pub data: Vec<f64>,
}

impl Reconstruction {
    pub fn decode(meta: &DatasetMeta, vectors: &[EncodedVector]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = vectors
            .par_iter()
            .map(|ev| decode_vector(ev, meta))
            .collect::<Result<_>>()?;
        Ok(Reconstruction {
            d: meta.d,
            data: rows.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

/// `<q, x̃>` decoded on the fly, mean term included.
pub fn quantized_dot(q: &[f32], ev: &EncodedVector, meta: &DatasetMeta) -> Result<f64> {
    dot_decoded(q, ev, meta)
}

fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

fn dot_mixed(a: &[f32], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y).sum()
}

/// Higher score first, then the smaller id.
fn rank_order(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// The `k` best of `scores`, ties broken by smaller id.
pub fn top_k(scores: &[f64], k: usize) -> Result<QueryResult> {
    if k > scores.len() {
        return Err(NvqError::Config(format!(
            "k = {k} exceeds the {} database vectors",
            scores.len()
        )));
    }
    let mut all: Vec<(f64, u32)> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i as u32))
        .collect();
    if k == 0 {
        return Ok(QueryResult {
            ids: Vec::new(),
            scores: Vec::new(),
        });
    }
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, rank_order);
        all.truncate(k);
    }
    all.sort_by(rank_order);
    Ok(QueryResult {
        ids: all.iter().map(|p| p.1).collect(),
        scores: all.iter().map(|p| p.0).collect(),
    })
}

fn check_queries(queries: &Dataset, d: usize) -> Result<()> {
    if !queries.is_empty() && queries.dim() != d {
        return Err(NvqError::DimensionMismatch {
            expected: d,
            found: queries.dim(),
        });
    }
    Ok(())
}

/// Exhaustive full-precision top-k by dot product.
pub fn exact_knn(queries: &Dataset, data: &Dataset, k: usize) -> Result<Vec<QueryResult>> {
    check_queries(queries, data.dim())?;
    queries
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|q| {
            let scores: Vec<f64> = data.rows().map(|x| dot_f32(q, x)).collect();
            top_k(&scores, k)
        })
        .collect()
}

/// Exhaustive top-k against reconstructed vectors.
pub fn reconstructed_knn(
    queries: &Dataset,
    rec: &Reconstruction,
    k: usize,
) -> Result<Vec<QueryResult>> {
    check_queries(queries, rec.d)?;
    queries
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|q| {
            let scores: Vec<f64> = (0..rec.len()).map(|i| dot_mixed(q, rec.row(i))).collect();
            top_k(&scores, k)
        })
        .collect()
}

/// Top-k over compressed vectors, decoding each dataset vector once.
pub fn approximate_knn(
    queries: &Dataset,
    meta: &DatasetMeta,
    vectors: &[EncodedVector],
    k: usize,
) -> Result<Vec<QueryResult>> {
    reconstructed_knn(queries, &Reconstruction::decode(meta, vectors)?, k)
}

fn check_pair(ground: &[QueryResult], approx: &[QueryResult], k: usize) -> Result<()> {
    if ground.len() != approx.len() {
        return Err(NvqError::DimensionMismatch {
            expected: ground.len(),
            found: approx.len(),
        });
    }
    if let Some(r) = ground.iter().chain(approx).find(|r| r.len() < k) {
        return Err(NvqError::Config(format!(
            "a result list holds {} ids, fewer than k = {k}",
            r.len()
        )));
    }
    Ok(())
}

/// `|ground@k ∩ approx@k| / k`, averaged over queries.
pub fn recall_at_k(ground: &[QueryResult], approx: &[QueryResult], k: usize) -> Result<f64> {
    check_pair(ground, approx, k)?;
    if ground.is_empty() || k == 0 {
        return Ok(0.0);
    }
    let hits: usize = ground
        .iter()
        .zip(approx)
        .map(|(g, a)| {
            let truth: HashSet<u32> = g.ids[..k].iter().copied().collect();
            a.ids[..k].iter().filter(|id| truth.contains(id)).count()
        })
        .sum();
    Ok(hits as f64 / (k * ground.len()) as f64)
}

/// Mean average precision of the approximate rankings against the exact top-k.
///
/// `AP = Σ_i rel_i · P@i / k` over the first `k` approximate results.
pub fn map_at_k(ground: &[QueryResult], approx: &[QueryResult], k: usize) -> Result<f64> {
    check_pair(ground, approx, k)?;
    if ground.is_empty() || k == 0 {
        return Ok(0.0);
    }
    let total: f64 = ground
        .iter()
        .zip(approx)
        .map(|(g, a)| {
            let truth: HashSet<u32> = g.ids[..k].iter().copied().collect();
            let mut hits = 0usize;
            let mut sum = 0.0;
            for (i, id) in a.ids[..k].iter().enumerate() {
                if truth.contains(id) {
                    hits += 1;
                    sum += hits as f64 / (i + 1) as f64;
                }
            }
            sum / k as f64
        })
        .sum();
    Ok(total / ground.len() as f64)
}

/// Wraps ivecs ground truth as id-only results.
pub fn ground_truth_from_ivecs(lists: &NeighborLists) -> Result<Vec<QueryResult>> {
    lists
        .rows()
        .filter(|_| !lists.is_empty())
        .map(|row| {
            let ids = row
                .iter()
                .map(|&i| {
                    u32::try_from(i)
                        .map_err(|_| NvqError::Config(format!("negative neighbor id {i}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(QueryResult {
                scores: vec![f64::NAN; ids.len()],
                ids,
            })
        })
        .collect()
}

/// Objective ratio of every stored subvector, recomputed from the raw data.
///
/// Constant subvectors and fallbacks count as 1.
pub fn objective_ratios(
    raw: &Dataset,
    meta: &DatasetMeta,
    vectors: &[EncodedVector],
) -> Result<Vec<Vec<f64>>> {
    check_sizes(raw, meta, vectors)?;
    vectors
        .par_iter()
        .enumerate()
        .map(|(i, ev)| {
            let subs = meta.centered_subvectors(raw.row(i))?;
            subs.iter()
                .zip(&ev.subvectors)
                .map(|(v, h)| {
                    if h.is_constant() || h.params.family == NonlinearityFamily::Uniform {
                        return Ok(1.0);
                    }
                    let unif = uniform_loss(v, h.interval, meta.beta);
                    let loss = nvq_loss(v, h.params, h.interval, meta.beta)?;
                    Ok(if loss == 0.0 { 1.0 } else { unif / loss })
                })
                .collect()
        })
        .collect()
}

fn check_sizes(raw: &Dataset, meta: &DatasetMeta, vectors: &[EncodedVector]) -> Result<()> {
    if raw.dim() != meta.d {
        return Err(NvqError::DimensionMismatch {
            expected: meta.d,
            found: raw.dim(),
        });
    }
    if raw.len() != vectors.len() {
        return Err(NvqError::DimensionMismatch {
            expected: raw.len(),
            found: vectors.len(),
        });
    }
    Ok(())
}

/// Aggregate quality of one compressed dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub family: NonlinearityFamily,
    pub beta: Bits,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    /// Mean objective ratio over all subvectors.
    pub mean_objective: f64,
    pub fallback_fraction: f64,
    /// Mean `‖x - x̃‖²` over vectors.
    pub mean_recon_error: f64,
    /// Mean over queries of `Σ_x (<q, x> - <q, x̃>)²`.
    pub mean_dot_error: f64,
    pub recall_at_k: f64,
    pub map_at_k: f64,
    pub k: usize,
}

/// Computes every metric of `vectors` against the raw dataset.
///
/// Exact neighbors are brute-forced unless `ground` supplies them.
pub fn error_stats(
    raw: &Dataset,
    meta: &DatasetMeta,
    vectors: &[EncodedVector],
    queries: &Dataset,
    k: usize,
    ground: Option<&[QueryResult]>,
) -> Result<MetricsReport> {
    check_sizes(raw, meta, vectors)?;
    if raw.is_empty() {
        return Err(NvqError::EmptyDataset);
    }
    check_queries(queries, meta.d)?;
    let rec = Reconstruction::decode(meta, vectors)?;
    let diff: Vec<f64> = raw
        .as_slice()
        .iter()
        .zip(&rec.data)
        .map(|(&x, &y)| x as f64 - y)
        .collect();
    let mse = diff
        .chunks_exact(meta.d)
        .map(|e| e.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / raw.len() as f64;

    let query_rows: Vec<&[f32]> = queries.rows().filter(|_| !queries.is_empty()).collect();
    let dot_error = if query_rows.is_empty() {
        0.0
    } else {
        query_rows
            .par_iter()
            .map(|q| {
                diff.chunks_exact(meta.d)
                    .map(|e| dot_mixed(q, e).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
            / query_rows.len() as f64
    };

    let (recall, map) = if query_rows.is_empty() {
        (1.0, 1.0)
    } else {
        let exact;
        let truth = match ground {
            Some(g) => g,
            None => {
                exact = exact_knn(queries, raw, k)?;
                &exact[..]
            }
        };
        let approx = reconstructed_knn(queries, &rec, k)?;
        (
            recall_at_k(truth, &approx, k)?,
            map_at_k(truth, &approx, k)?,
        )
    };

    let ratios = objective_ratios(raw, meta, vectors)?;
    let count = (raw.len() * meta.m) as f64;
    let mean_objective = ratios.iter().flatten().sum::<f64>() / count;
    let fallbacks = vectors
        .iter()
        .flat_map(|ev| &ev.subvectors)
        .filter(|h| h.fell_back)
        .count();
    Ok(MetricsReport {
        family: meta.family,
        beta: meta.beta,
        m: meta.m,
        n: raw.len(),
        d: meta.d,
        mean_objective,
        fallback_fraction: fallbacks as f64 / count,
        mean_recon_error: mse,
        mean_dot_error: dot_error,
        recall_at_k: recall,
        map_at_k: map,
        k,
    })
}
