use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use nvq::bench::{self, Direction};
use nvq::codec::{
    decode_dataset, encode_dataset, nvq_file_size, read_fvecs, read_ivecs, read_nvq_file,
    vecs_file_size, write_fvecs, write_nvq_file, Dataset, DatasetMeta, EncodeOptions,
    EncodedVector,
};
use nvq::eval::{
    error_stats, exact_knn, ground_truth_from_ivecs, objective_ratios, MetricsReport, QueryResult,
};
use nvq::optimizer::default_hyperparams;
use nvq::{Bits, NonlinearityFamily, NvqError};

use crate::{
    BenchArgs, Command, Common, CompressArgs, DecompressArgs, EvalArgs, FitArgs, InspectArgs,
    SynthArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => {
            set_threads(&a.common)?;
            synth(a)
        }
        Command::Compress(a) => {
            set_threads(&a.common)?;
            compress(a)
        }
        Command::Decompress(a) => {
            set_threads(&a.common)?;
            decompress(a)
        }
        Command::Eval(a) => {
            set_threads(&a.common)?;
            eval(a)
        }
        Command::Bench(a) => {
            set_threads(&a.common)?;
            bench(a)
        }
        Command::Inspect(a) => {
            set_threads(&a.common)?;
            inspect(a)
        }
    }
}

fn set_threads(common: &Common) -> Result<()> {
    let Some(n) = common.threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(NvqError::Config("--threads must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("starting the thread pool")
}

fn encode_options(fit: &FitArgs) -> Result<EncodeOptions> {
    let mut hp = default_hyperparams(2)?;
    if fit.max_iters == 0 {
        return Err(NvqError::Config("--max-iters must be at least 1".into()).into());
    }
    hp.max_iters = fit.max_iters;
    hp.min_iters = hp.min_iters.min(fit.max_iters);
    hp.tol = fit.tol;
    hp.validate()?;
    Ok(EncodeOptions {
        hyperparams: hp,
        seed: fit.seed,
    })
}

fn read_input(path: &Path) -> Result<Dataset> {
    read_fvecs(path).with_context(|| format!("reading {}", path.display()))
}

fn synth(a: SynthArgs) -> Result<()> {
    let data = nvq::synth::bell_shaped(a.count, a.dim, a.seed)?;
    write_fvecs(&a.output, &data).with_context(|| format!("writing {}", a.output.display()))?;
    eprintln!(
        "wrote {} vectors of dimension {} to {}",
        data.len(),
        a.dim,
        a.output.display()
    );
    Ok(())
}

fn compress(a: CompressArgs) -> Result<()> {
    let beta = Bits::new(a.bits)?;
    let opts = encode_options(&a.fit)?;
    let data = read_input(&a.input)?;
    let enc = encode_dataset(&data, a.subvectors, beta, a.family, &opts)?;
    write_nvq_file(&a.output, &enc.meta, &enc.vectors)
        .with_context(|| format!("writing {}", a.output.display()))?;
    let raw = vecs_file_size(enc.meta.d, enc.meta.n) as f64;
    let packed = nvq_file_size(enc.meta.d, enc.meta.n, enc.meta.m, beta) as f64;
    println!(
        "n={} d={} m={} bits={} family={} mean_objective={:.6} fallback_fraction={:.6} compression_ratio={:.4}",
        enc.meta.n,
        enc.meta.d,
        enc.meta.m,
        beta,
        enc.meta.family,
        enc.mean_objective().unwrap_or(1.0),
        enc.fallback_fraction().unwrap_or(0.0),
        raw / packed,
    );
    Ok(())
}

fn read_container(path: &Path) -> Result<(DatasetMeta, Vec<EncodedVector>)> {
    read_nvq_file(path).with_context(|| format!("reading {}", path.display()))
}

fn decompress(a: DecompressArgs) -> Result<()> {
    let (meta, vectors) = read_container(&a.input)?;
    let data = decode_dataset(&meta, &vectors)?;
    write_fvecs(&a.output, &data).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

const REPORT_COLUMNS: [&str; 12] = [
    "family",
    "beta",
    "m",
    "n",
    "d",
    "mean_objective",
    "fallback_fraction",
    "mse",
    "dot_error",
    "recall_at_k",
    "map_at_k",
    "k",
];

fn report_record(r: &MetricsReport) -> [String; 12] {
    [
        r.family.to_string(),
        r.beta.to_string(),
        r.m.to_string(),
        r.n.to_string(),
        r.d.to_string(),
        r.mean_objective.to_string(),
        r.fallback_fraction.to_string(),
        r.mean_recon_error.to_string(),
        r.mean_dot_error.to_string(),
        r.recall_at_k.to_string(),
        r.map_at_k.to_string(),
        r.k.to_string(),
    ]
}

fn load_queries(a: &EvalArgs, d: usize) -> Result<Dataset> {
    let queries = match &a.query_file {
        Some(p) => read_input(p)?,
        None => nvq::synth::bell_shaped(a.queries, d, a.fit.seed.wrapping_add(1))?,
    };
    if !queries.is_empty() && queries.dim() != d {
        return Err(NvqError::DimensionMismatch {
            expected: d,
            found: queries.dim(),
        }
        .into());
    }
    Ok(queries)
}

fn load_ground_truth(
    a: &EvalArgs,
    queries: &Dataset,
    data: &Dataset,
) -> Result<Option<Vec<QueryResult>>> {
    if queries.is_empty() {
        return Ok(None);
    }
    let ground = match &a.ground_truth {
        Some(p) => {
            let lists = read_ivecs(p).with_context(|| format!("reading {}", p.display()))?;
            let g = ground_truth_from_ivecs(&lists)?;
            if g.len() != queries.len() {
                return Err(NvqError::DimensionMismatch {
                    expected: queries.len(),
                    found: g.len(),
                })
                .context("ground truth needs one neighbor list per query");
            }
            if let Some(&bad) = g
                .iter()
                .flat_map(|q| &q.ids)
                .find(|&&id| id as usize >= data.len())
            {
                return Err(NvqError::Config(format!(
                    "ground truth id {bad} is out of range for {} vectors",
                    data.len()
                ))
                .into());
            }
            g
        }
        None => exact_knn(queries, data, a.k)?,
    };
    Ok(Some(ground))
}

fn eval(a: EvalArgs) -> Result<()> {
    let data = read_input(&a.input)?;
    if data.is_empty() {
        return Err(NvqError::EmptyDataset.into());
    }
    let queries = load_queries(&a, data.dim())?;
    let ground = load_ground_truth(&a, &queries, &data)?;

    let mut report = csv::Writer::from_writer(open_output(a.output.as_deref())?);
    report.write_record(REPORT_COLUMNS)?;
    let mut per_vector = match &a.per_vector {
        Some(p) => {
            let mut w = csv::Writer::from_writer(open_output(Some(p))?);
            w.write_record([
                "family",
                "beta",
                "m",
                "vector",
                "subvector",
                "objective",
                "fell_back",
            ])?;
            Some(w)
        }
        None => None,
    };

    let mut emit = |meta: &DatasetMeta, vectors: &[EncodedVector]| -> Result<()> {
        let r = error_stats(&data, meta, vectors, &queries, a.k, ground.as_deref())?;
        report.write_record(report_record(&r))?;
        report.flush()?;
        if let Some(w) = per_vector.as_mut() {
            let ratios = objective_ratios(&data, meta, vectors)?;
            for (i, (row, ev)) in ratios.iter().zip(vectors).enumerate() {
                for (j, (ratio, h)) in row.iter().zip(&ev.subvectors).enumerate() {
                    w.write_record([
                        meta.family.to_string(),
                        meta.beta.to_string(),
                        meta.m.to_string(),
                        i.to_string(),
                        j.to_string(),
                        ratio.to_string(),
                        u8::from(h.fell_back).to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        Ok(())
    };

    if let Some(p) = &a.compressed {
        let (meta, vectors) = read_container(p)?;
        emit(&meta, &vectors)?;
        return Ok(());
    }

    let families = if a.family.is_empty() {
        NonlinearityFamily::ALL.to_vec()
    } else {
        a.family.clone()
    };
    let bits = if a.bits.is_empty() {
        vec![8]
    } else {
        a.bits.clone()
    };
    let bits = bits
        .into_iter()
        .map(Bits::new)
        .collect::<Result<Vec<_>, _>>()?;
    let ms = if a.subvectors.is_empty() {
        vec![1]
    } else {
        a.subvectors.clone()
    };
    let opts = encode_options(&a.fit)?;
    let mut runs = 0;
    for &family in &families {
        for &beta in &bits {
            for &m in &ms {
                let enc = encode_dataset(&data, m, beta, family, &opts)?;
                emit(&enc.meta, &enc.vectors)?;
                runs += 1;
            }
        }
    }
    eprintln!("evaluated {} configurations", runs);
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let beta = Bits::new(a.bits)?;
    let mut w = csv::Writer::from_writer(open_output(a.output.as_deref())?);
    w.write_record([
        "family",
        "direction",
        "ops",
        "seconds",
        "values_per_second",
        "exp",
        "log",
        "fma",
        "mul",
        "div",
    ])?;
    for family in NonlinearityFamily::ALL {
        let (enc, dec) = bench::op_counts(family);
        for (direction, counts, name) in [
            (Direction::Encode, enc, "encode"),
            (Direction::Decode, dec, "decode"),
        ] {
            let t = bench::measure(family, direction, beta, a.ops, a.seed)?;
            w.write_record([
                family.to_string(),
                name.to_string(),
                t.ops.to_string(),
                t.elapsed.as_secs_f64().to_string(),
                t.per_second().to_string(),
                counts.exp.to_string(),
                counts.log.to_string(),
                counts.fma.to_string(),
                counts.mul.to_string(),
                counts.div.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let (meta, vectors) = read_container(&a.input)?;
    let subs = || vectors.iter().flat_map(|ev| &ev.subvectors);
    let count = subs().count();
    let fell_back = subs().filter(|h| h.fell_back).count();
    let constant = subs().filter(|h| h.is_constant()).count();
    let mut out = io::stdout().lock();
    writeln!(out, "format: NVQ1")?;
    writeln!(out, "vectors: {}", meta.n)?;
    writeln!(out, "dimension: {}", meta.d)?;
    writeln!(out, "subvectors: {}", meta.m)?;
    writeln!(out, "bits: {}", meta.beta)?;
    writeln!(out, "family: {}", meta.family)?;
    writeln!(out, "partition_seed: {}", meta.partition_seed)?;
    writeln!(
        out,
        "file_size: {}",
        nvq_file_size(meta.d, meta.n, meta.m, meta.beta)
    )?;
    writeln!(out, "fvecs_size: {}", vecs_file_size(meta.d, meta.n))?;
    writeln!(out, "fell_back: {fell_back} of {count}")?;
    writeln!(out, "constant: {constant} of {count}")?;
    let fitted: Vec<[f64; 2]> = subs()
        .filter(|h| {
            !h.fell_back && !h.is_constant() && h.params.family != NonlinearityFamily::Uniform
        })
        .map(|h| [h.params.p1, h.params.p2])
        .collect();
    if !fitted.is_empty() {
        for (idx, name) in ["p1", "p2"].iter().enumerate() {
            let vals: Vec<f64> = fitted.iter().map(|p| p[idx]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            writeln!(out, "{name}: mean {mean:.6} min {lo:.6} max {hi:.6}")?;
        }
    }
    Ok(())
}
