//! Dataset pipeline: centering, the random subvector split, per-vector
//! encoding and decoding, and the on-disk formats.

mod container;
mod vecs;

pub use container::{
    header_size, nvq_file_size, read_nvq, read_nvq_file, record_size, write_nvq, write_nvq_file,
    FORMAT_VERSION, MAGIC,
};
pub use vecs::{
    read_fvecs, read_ivecs, read_vecs, vecs_file_size, write_fvecs, write_ivecs, write_vecs,
    Dataset, NeighborLists, VecElement, VecFormat, VecSet,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{NvqError, Result};
use crate::nonlinearity::{project_params, Interval, NonlinearityFamily, NonlinearityParams};
use crate::optimizer::{default_hyperparams, fit_in_interval, SnesHyperparams};
use crate::quantizer::{pack_codes, uniform_loss, Bits, CodeBlock, Quantizer};

/// Subvector counts the container accepts.
pub const SUBVECTOR_COUNTS: [usize; 4] = [1, 2, 4, 8];

/// Stream reserved for the partition shuffle; vector `i` fits on stream `i`.
const PARTITION_STREAM: u64 = u64::MAX;

/// Layout shared by every vector of a compressed dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub beta: Bits,
    pub family: NonlinearityFamily,
    /// Per-coordinate mean subtracted before quantizing.
    pub mean: Vec<f32>,
    /// Subvector `j` holds coordinates `permutation[j * d / m..(j + 1) * d / m]`.
    pub permutation: Vec<u32>,
    pub partition_seed: u64,
}

impl DatasetMeta {
    /// Centers on the mean of `data` and draws the partition from `seed`.
    pub fn for_dataset(
        data: &Dataset,
        m: usize,
        beta: Bits,
        family: NonlinearityFamily,
        seed: u64,
    ) -> Result<Self> {
        let mean = compute_mean(data)?;
        let permutation = make_partition(data.dim(), m, seed)?;
        Ok(DatasetMeta {
            d: data.dim(),
            n: data.len(),
            m,
            beta,
            family,
            mean,
            permutation,
            partition_seed: seed,
        })
    }

    pub fn subvector_len(&self) -> usize {
        self.d / self.m
    }

    pub fn validate(&self) -> Result<()> {
        check_layout(self.d, self.m)?;
        if self.mean.len() != self.d {
            return Err(NvqError::DimensionMismatch {
                expected: self.d,
                found: self.mean.len(),
            });
        }
        if !is_permutation(&self.permutation, self.d) {
            return Err(NvqError::Config(format!(
                "partition is not a permutation of 0..{}",
                self.d
            )));
        }
        Ok(())
    }

    /// Centered coordinates of `x`, grouped by subvector.
    pub fn centered_subvectors(&self, x: &[f32]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.d {
            return Err(NvqError::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        Ok(self
            .permutation
            .chunks_exact(self.subvector_len())
            .map(|idx| {
                idx.iter()
                    .map(|&i| x[i as usize] as f64 - self.mean[i as usize] as f64)
                    .collect()
            })
            .collect())
    }
}

fn check_layout(d: usize, m: usize) -> Result<()> {
    if !SUBVECTOR_COUNTS.contains(&m) {
        return Err(NvqError::Config(format!(
            "subvector count must be 1, 2, 4 or 8, got {m}"
        )));
    }
    if !d.is_multiple_of(m) {
        return Err(NvqError::Config(format!(
            "{m} subvectors do not divide dimension {d}"
        )));
    }
    Ok(())
}

pub(crate) fn is_permutation(p: &[u32], d: usize) -> bool {
    if p.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    for &i in p {
        match seen.get_mut(i as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// Arithmetic mean of every coordinate, accumulated in double precision.
pub fn compute_mean(data: &Dataset) -> Result<Vec<f32>> {
    if data.is_empty() {
        return Err(NvqError::EmptyDataset);
    }
    let mut acc = vec![0.0f64; data.dim()];
    for row in data.rows() {
        for (a, &v) in acc.iter_mut().zip(row) {
            *a += v as f64;
        }
    }
    let n = data.len() as f64;
    Ok(acc.into_iter().map(|s| (s / n) as f32).collect())
}

/// A seeded shuffle of `0..d`; the identity when `m = 1`.
pub fn make_partition(d: usize, m: usize, seed: u64) -> Result<Vec<u32>> {
    check_layout(d, m)?;
    let d32 = u32::try_from(d).map_err(|_| NvqError::Config(format!("dimension {d} too large")))?;
    let mut p: Vec<u32> = (0..d32).collect();
    if m > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(PARTITION_STREAM);
        p.shuffle(&mut rng);
    }
    Ok(p)
}

/// The generator used to fit vector `index` of a dataset encoded with `seed`.
pub fn vector_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stored description of one subvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubvectorHeader {
    pub interval: Interval,
    pub params: NonlinearityParams,
    /// The learned nonlinearity did not beat uniform and was replaced by it.
    pub fell_back: bool,
}

impl SubvectorHeader {
    pub fn is_constant(&self) -> bool {
        self.interval.is_degenerate()
    }

    fn quantizer(&self, beta: Bits) -> Result<Quantizer> {
        Quantizer::new(self.params, self.interval, beta)
    }
}

/// One compressed vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedVector {
    pub subvectors: Vec<SubvectorHeader>,
    /// `d` codes, subvector after subvector.
    pub codes: CodeBlock,
}

/// Fit diagnostics of one subvector; not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubvectorFit {
    /// Objective ratio of the stored parameters (1 for uniform and constants).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub fell_back: bool,
    pub constant: bool,
}

/// Settings of the per-vector fitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    pub hyperparams: SnesHyperparams,
    /// Base seed; vector `i` fits with [`vector_rng`]`(seed, i)`.
    pub seed: u64,
}

impl EncodeOptions {
    pub fn new(seed: u64) -> Self {
        EncodeOptions {
            hyperparams: default_hyperparams(2).expect("two parameters"),
            seed,
        }
    }
}

/// Rounds fitted parameters to what the container stores, keeping `x0`
/// inside the feasible box after rounding.
fn storable(params: NonlinearityParams, iv: Interval) -> NonlinearityParams {
    let mut p = project_params(params, iv).to_f32_precision();
    if matches!(
        p.family,
        NonlinearityFamily::LogLog | NonlinearityFamily::Nqt
    ) {
        let (lo, hi) = iv.scaled_bounds();
        let mut x0 = p.p2 as f32;
        while (x0 as f64) < lo {
            x0 = x0.next_up();
        }
        while (x0 as f64) > hi {
            x0 = x0.next_down();
        }
        p.p2 = x0 as f64;
    }
    p
}

/// Fits, rounds and quantizes one centered subvector.
fn encode_subvector<R: rand::Rng + ?Sized>(
    values: &[f64],
    meta: &DatasetMeta,
    hp: &SnesHyperparams,
    rng: &mut R,
    codes: &mut Vec<u16>,
) -> Result<(SubvectorHeader, SubvectorFit)> {
    let iv = Interval::of(values)
        .ok_or_else(|| NvqError::Domain("non-finite vector entry".into()))?
        .widen_to_f32();
    let mut fit = SubvectorFit {
        objective: 1.0,
        iterations: 0,
        converged: true,
        fell_back: false,
        constant: false,
    };
    let mut header = SubvectorHeader {
        interval: iv,
        params: NonlinearityParams::uniform(),
        fell_back: false,
    };
    if iv.is_degenerate() {
        fit.constant = true;
        fit.fell_back = meta.family != NonlinearityFamily::Uniform;
        header.fell_back = fit.fell_back;
        codes.extend(std::iter::repeat_n(0, values.len()));
        return Ok((header, fit));
    }
    if meta.family != NonlinearityFamily::Uniform {
        let r = fit_in_interval(values, iv, meta.family, meta.beta, hp, rng)?;
        fit.iterations = r.iterations;
        fit.converged = r.converged;
        if r.fell_back_to_uniform {
            fit.fell_back = true;
        } else {
            // Re-check with the rounded parameters the decoder will see.
            let stored = storable(r.params, iv);
            let q = Quantizer::new(stored, iv, meta.beta)?;
            let loss = q.loss(values);
            let unif = uniform_loss(values, iv, meta.beta);
            let ratio = if loss == 0.0 { 1.0 } else { unif / loss };
            if ratio >= 1.0 {
                header.params = stored;
                fit.objective = ratio;
            } else {
                fit.fell_back = true;
            }
        }
        header.fell_back = fit.fell_back;
    }
    let q = header.quantizer(meta.beta)?;
    codes.extend(values.iter().map(|&v| q.quantize(v)));
    Ok((header, fit))
}

/// Compresses one raw vector, also returning per-subvector diagnostics.
pub fn encode_vector_with_report<R: rand::Rng + ?Sized>(
    x: &[f32],
    meta: &DatasetMeta,
    hp: &SnesHyperparams,
    rng: &mut R,
) -> Result<(EncodedVector, Vec<SubvectorFit>)> {
    let subs = meta.centered_subvectors(x)?;
    let mut headers = Vec::with_capacity(meta.m);
    let mut fits = Vec::with_capacity(meta.m);
    let mut codes = Vec::with_capacity(meta.d);
    for values in &subs {
        let (h, f) = encode_subvector(values, meta, hp, rng, &mut codes)?;
        headers.push(h);
        fits.push(f);
    }
    let codes = pack_codes(&codes, meta.beta)?;
    Ok((
        EncodedVector {
            subvectors: headers,
            codes,
        },
        fits,
    ))
}

/// Compresses one raw vector.
pub fn encode_vector<R: rand::Rng + ?Sized>(
    x: &[f32],
    meta: &DatasetMeta,
    hp: &SnesHyperparams,
    rng: &mut R,
) -> Result<EncodedVector> {
    encode_vector_with_report(x, meta, hp, rng).map(|(ev, _)| ev)
}

fn check_encoded(ev: &EncodedVector, meta: &DatasetMeta) -> Result<()> {
    if ev.subvectors.len() != meta.m {
        return Err(NvqError::DimensionMismatch {
            expected: meta.m,
            found: ev.subvectors.len(),
        });
    }
    if ev.codes.len() != meta.d || ev.codes.beta() != meta.beta {
        return Err(NvqError::Config(format!(
            "code block of {} {}-bit codes does not match d={} beta={}",
            ev.codes.len(),
            ev.codes.beta(),
            meta.d,
            meta.beta
        )));
    }
    Ok(())
}

/// Dequantizes every code and applies `f(coordinate, centered value)`.
fn for_each_centered(
    ev: &EncodedVector,
    meta: &DatasetMeta,
    mut f: impl FnMut(usize, f64),
) -> Result<()> {
    check_encoded(ev, meta)?;
    let s = meta.subvector_len();
    let mut codes = ev.codes.iter();
    for (j, header) in ev.subvectors.iter().enumerate() {
        let idx = &meta.permutation[j * s..(j + 1) * s];
        if header.is_constant() {
            for &i in idx {
                codes.next();
                f(i as usize, header.interval.x_min);
            }
            continue;
        }
        let q = header.quantizer(meta.beta)?;
        let table = q.dequantize_table();
        for (&i, c) in idx.iter().zip(&mut codes) {
            f(i as usize, table[c as usize]);
        }
    }
    Ok(())
}

/// Reconstruction in the centered frame, in original coordinate order.
pub fn decode_centered(ev: &EncodedVector, meta: &DatasetMeta) -> Result<Vec<f64>> {
    let mut out = vec![0.0; meta.d];
    for_each_centered(ev, meta, |i, v| out[i] = v)?;
    Ok(out)
}

/// Reconstruction `x̃`, mean included.
pub fn decode_vector(ev: &EncodedVector, meta: &DatasetMeta) -> Result<Vec<f64>> {
    let mut out = vec![0.0; meta.d];
    for_each_centered(ev, meta, |i, v| out[i] = v + meta.mean[i] as f64)?;
    Ok(out)
}

/// `<q, x̃>` without materializing `x̃`.
pub fn dot_decoded(q: &[f32], ev: &EncodedVector, meta: &DatasetMeta) -> Result<f64> {
    if q.len() != meta.d {
        return Err(NvqError::DimensionMismatch {
            expected: meta.d,
            found: q.len(),
        });
    }
    let mut acc = 0.0;
    for_each_centered(ev, meta, |i, v| acc += q[i] as f64 * v)?;
    let shift: f64 = q
        .iter()
        .zip(&meta.mean)
        .map(|(&a, &b)| a as f64 * b as f64)
        .sum();
    Ok(acc + shift)
}

/// A compressed dataset plus the fit diagnostics of its vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub meta: DatasetMeta,
    pub vectors: Vec<EncodedVector>,
    /// Empty when the dataset was read back from disk.
    pub fits: Vec<Vec<SubvectorFit>>,
}

impl EncodedDataset {
    /// Mean objective ratio over every subvector, or `None` without diagnostics.
    pub fn mean_objective(&self) -> Option<f64> {
        mean_of(self.fits.iter().flatten().map(|f| f.objective))
    }

    /// Share of subvectors that fell back to the uniform quantizer.
    pub fn fallback_fraction(&self) -> Option<f64> {
        mean_of(
            self.fits
                .iter()
                .flatten()
                .map(|f| if f.fell_back { 1.0 } else { 0.0 }),
        )
    }

    pub fn decode_all(&self) -> Result<Dataset> {
        decode_dataset(&self.meta, &self.vectors)
    }
}

fn mean_of(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Centers, partitions and encodes `data` in parallel.
///
/// Each vector fits with its own generator stream, so the result does not
/// depend on the number of threads.
pub fn encode_dataset(
    data: &Dataset,
    m: usize,
    beta: Bits,
    family: NonlinearityFamily,
    opts: &EncodeOptions,
) -> Result<EncodedDataset> {
    opts.hyperparams.validate()?;
    let meta = DatasetMeta::for_dataset(data, m, beta, family, opts.seed)?;
    encode_with_meta(data, meta, opts)
}

/// Encodes `data` under an existing layout.
pub fn encode_with_meta(
    data: &Dataset,
    mut meta: DatasetMeta,
    opts: &EncodeOptions,
) -> Result<EncodedDataset> {
    meta.validate()?;
    if data.dim() != meta.d {
        return Err(NvqError::DimensionMismatch {
            expected: meta.d,
            found: data.dim(),
        });
    }
    meta.n = data.len();
    let results: Vec<_> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = vector_rng(opts.seed, i as u64);
            encode_vector_with_report(data.row(i), &meta, &opts.hyperparams, &mut rng)
        })
        .collect::<Result<_>>()?;
    let (vectors, fits) = results.into_iter().unzip();
    Ok(EncodedDataset {
        meta,
        vectors,
        fits,
    })
}

/// Decodes every vector back to single precision.
pub fn decode_dataset(meta: &DatasetMeta, vectors: &[EncodedVector]) -> Result<Dataset> {
    let rows: Vec<Vec<f32>> = vectors
        .par_iter()
        .map(|ev| {
            Ok(decode_vector(ev, meta)?
                .into_iter()
                .map(|v| v as f32)
                .collect())
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(VecSet::new(meta.d, Vec::new()).unwrap_or_else(|_| VecSet::empty()));
    }
    Dataset::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::nvq_loss;

    fn bell_rows(n: usize, d: usize, seed: u64) -> Dataset {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f32> = (0..n * d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (0.1 * z) as f32
            })
            .collect();
        Dataset::new(d, data).unwrap()
    }

    fn quick_opts() -> EncodeOptions {
        let mut o = EncodeOptions::new(7);
        o.hyperparams.max_iters = 30;
        o
    }

    #[test]
    fn mean_examples() {
        let one = Dataset::from_rows(&[[1.5f32, -2.0]]).unwrap();
        assert_eq!(compute_mean(&one).unwrap(), vec![1.5, -2.0]);
        let pair = Dataset::from_rows(&[[1.5f32, -2.0], [-1.5, 2.0]]).unwrap();
        assert_eq!(compute_mean(&pair).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            compute_mean(&Dataset::empty()),
            Err(NvqError::EmptyDataset)
        ));
    }

    #[test]
    fn mean_matches_two_pass_oracle() {
        let data = bell_rows(100, 8, 3);
        let mean = compute_mean(&data).unwrap();
        for (j, &got) in mean.iter().enumerate() {
            let mut col: Vec<f64> = (0..100).map(|i| data.row(i)[j] as f64).collect();
            col.sort_by(f64::total_cmp);
            let first: f64 = col.iter().sum::<f64>() / 100.0;
            let fix: f64 = col.iter().map(|v| v - first).sum::<f64>() / 100.0;
            assert!((got as f64 - (first + fix)).abs() < 1e-7);
        }
    }

    #[test]
    fn partition_examples() {
        assert_eq!(make_partition(6, 1, 9).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        let a = make_partition(8, 2, 42).unwrap();
        assert_eq!(a, make_partition(8, 2, 42).unwrap());
        assert_ne!(a, make_partition(8, 2, 43).unwrap());
        assert!(is_permutation(&a, 8));
        assert!(matches!(make_partition(10, 4, 1), Err(NvqError::Config(_))));
        assert!(matches!(make_partition(12, 3, 1), Err(NvqError::Config(_))));
    }

    #[test]
    fn mean_vector_encodes_as_constants() {
        let data = bell_rows(5, 16, 1);
        let meta =
            DatasetMeta::for_dataset(&data, 2, Bits::EIGHT, NonlinearityFamily::LogLog, 0).unwrap();
        let x = meta.mean.clone();
        let mut rng = vector_rng(0, 0);
        let ev = encode_vector(&x, &meta, &quick_opts().hyperparams, &mut rng).unwrap();
        for h in &ev.subvectors {
            assert!(h.is_constant());
            assert!(h.fell_back);
            assert_eq!(h.params, NonlinearityParams::uniform());
        }
        assert!(ev.codes.iter().all(|c| c == 0));
        let back = decode_vector(&ev, &meta).unwrap();
        for (b, &m) in back.iter().zip(&meta.mean) {
            assert_eq!(*b, m as f64);
        }
    }

    #[test]
    fn squared_error_is_sum_of_subvector_losses() {
        let data = bell_rows(4, 32, 2);
        let opts = quick_opts();
        for family in NonlinearityFamily::ALL {
            let enc = encode_dataset(&data, 4, Bits::FOUR, family, &opts).unwrap();
            for (i, ev) in enc.vectors.iter().enumerate() {
                let x = data.row(i);
                let rec = decode_vector(ev, &enc.meta).unwrap();
                let err: f64 = x
                    .iter()
                    .zip(&rec)
                    .map(|(&a, b)| (a as f64 - b).powi(2))
                    .sum();
                let subs = enc.meta.centered_subvectors(x).unwrap();
                let oracle: f64 = subs
                    .iter()
                    .zip(&ev.subvectors)
                    .map(|(v, h)| nvq_loss(v, h.params, h.interval, Bits::FOUR).unwrap())
                    .sum();
                assert!((err - oracle).abs() <= 1e-9 * oracle.max(1e-12), "{family}");
            }
        }
    }

    #[test]
    fn never_worse_than_uniform_layout() {
        let data = bell_rows(6, 64, 5);
        let opts = quick_opts();
        let unif =
            encode_dataset(&data, 2, Bits::EIGHT, NonlinearityFamily::Uniform, &opts).unwrap();
        for family in NonlinearityFamily::LEARNED {
            let enc = encode_dataset(&data, 2, Bits::EIGHT, family, &opts).unwrap();
            assert_eq!(enc.meta.permutation, unif.meta.permutation);
            for i in 0..data.len() {
                let x = data.row(i);
                let mse = |ev: &EncodedVector| -> f64 {
                    let r = decode_vector(ev, &enc.meta).unwrap();
                    x.iter().zip(&r).map(|(&a, b)| (a as f64 - b).powi(2)).sum()
                };
                assert!(mse(&enc.vectors[i]) <= mse(&unif.vectors[i]) * (1.0 + 1e-12));
                assert!(enc.fits[i].iter().all(|f| f.objective >= 1.0));
            }
        }
    }

    #[test]
    fn grid_vector_recovers_exactly() {
        // Centered values on the uniform 4-bit grid over [-1, 1.4].
        let mut x: Vec<f32> = (0..16).map(|k| -1.0 + 0.16 * k as f32).collect();
        x.reverse();
        let meta = DatasetMeta {
            d: 16,
            n: 1,
            m: 1,
            beta: Bits::FOUR,
            family: NonlinearityFamily::Uniform,
            mean: vec![0.0; 16],
            permutation: (0..16).collect(),
            partition_seed: 0,
        };
        let mut rng = vector_rng(0, 0);
        let ev = encode_vector(&x, &meta, &quick_opts().hyperparams, &mut rng).unwrap();
        let back = decode_vector(&ev, &meta).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((*a as f64 - b).abs() < 1e-6, "{a} {b}");
        }
    }

    #[test]
    fn zero_codes_decode_to_lower_ends() {
        let data = bell_rows(3, 8, 4);
        let enc = encode_dataset(
            &data,
            2,
            Bits::EIGHT,
            NonlinearityFamily::Nqt,
            &quick_opts(),
        )
        .unwrap();
        let mut ev = enc.vectors[0].clone();
        ev.codes = pack_codes(&[0; 8], Bits::EIGHT).unwrap();
        let c = decode_centered(&ev, &enc.meta).unwrap();
        for (j, h) in ev.subvectors.iter().enumerate() {
            for &i in &enc.meta.permutation[j * 4..(j + 1) * 4] {
                assert_eq!(c[i as usize], h.interval.x_min);
            }
        }
    }

    #[test]
    fn encoding_is_thread_independent() {
        let data = bell_rows(8, 16, 6);
        let opts = quick_opts();
        let a = encode_dataset(&data, 2, Bits::EIGHT, NonlinearityFamily::LogLog, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool
            .install(|| encode_dataset(&data, 2, Bits::EIGHT, NonlinearityFamily::LogLog, &opts))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let data = bell_rows(2, 8, 4);
        let meta =
            DatasetMeta::for_dataset(&data, 1, Bits::EIGHT, NonlinearityFamily::Nqt, 0).unwrap();
        let mut rng = vector_rng(0, 0);
        let err = encode_vector(&[0.0; 7], &meta, &quick_opts().hyperparams, &mut rng);
        assert!(matches!(err, Err(NvqError::DimensionMismatch { .. })));
    }

    #[test]
    fn payload_accounting() {
        // 16 bytes of intervals and parameters per subvector.
        let data = bell_rows(1, 1536, 8);
        let enc = encode_dataset(
            &data,
            2,
            Bits::EIGHT,
            NonlinearityFamily::Uniform,
            &quick_opts(),
        )
        .unwrap();
        let ev = &enc.vectors[0];
        assert_eq!(ev.subvectors.len() * 4 * 4, 32);
        assert_eq!(ev.codes.as_bytes().len(), 1536);
    }
}
