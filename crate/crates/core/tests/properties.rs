use nvq::codec::{
    encode_dataset, make_partition, nvq_file_size, read_nvq, read_vecs, write_nvq, write_vecs,
    Dataset, DatasetMeta, EncodeOptions, VecSet,
};
use nvq::eval::{map_at_k, quantized_dot, recall_at_k, top_k, QueryResult};
use nvq::quantizer::uniform_loss;
use nvq::{Bits, Interval, NonlinearityFamily, NonlinearityParams, Quantizer};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = NonlinearityFamily> {
    prop::sample::select(NonlinearityFamily::ALL.to_vec())
}

fn bits() -> impl Strategy<Value = Bits> {
    prop::sample::select(vec![Bits::FOUR, Bits::EIGHT])
}

/// `(m, dataset)` with `m` dividing the dimension.
fn layout_and_data(max_n: usize) -> impl Strategy<Value = (usize, Dataset)> {
    (
        prop::sample::select(vec![1usize, 2, 4, 8]),
        1usize..4,
        1..=max_n,
    )
        .prop_flat_map(|(m, per, n)| {
            let d = m * per;
            prop::collection::vec(-2.0f32..2.0, n * d)
                .prop_map(move |v| (m, Dataset::new(d, v).unwrap()))
        })
}

fn quick() -> EncodeOptions {
    let mut o = EncodeOptions::new(3);
    o.hyperparams.max_iters = 12;
    o.hyperparams.min_iters = 2;
    o
}

fn params_for(family: NonlinearityFamily, iv: Interval, p: f64, s: f64) -> NonlinearityParams {
    let (lo, hi) = iv.scaled_bounds();
    match family {
        NonlinearityFamily::Uniform => NonlinearityParams::uniform(),
        NonlinearityFamily::Kumaraswamy => {
            NonlinearityParams::kumaraswamy(0.5 + 2.5 * p, 0.5 + 2.5 * s)
        }
        NonlinearityFamily::LogLog => {
            NonlinearityParams::loglog(25.0 * p + 1e-6, lo + (hi - lo) * s)
        }
        NonlinearityFamily::Nqt => NonlinearityParams::nqt(25.0 * p + 1e-6, lo + (hi - lo) * s),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dequantized_levels_are_ordered_and_inside(
        family in family(), beta in bits(),
        lo in -3.0f64..3.0, width in 1e-3f64..5.0, p in 0.0f64..1.0, s in 0.0f64..1.0,
        x in 0.0f64..1.0,
    ) {
        let iv = Interval::new(lo, lo + width).unwrap();
        let q = Quantizer::new(params_for(family, iv, p, s), iv, beta).unwrap();
        let levels: Vec<f64> = (0..=beta.max_code()).map(|c| q.dequantize(c)).collect();
        prop_assert!(levels.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(levels.iter().all(|&v| v >= iv.x_min - 1e-9 * width && v <= iv.x_max + 1e-9 * width));
        let code = q.quantize(iv.x_min + x * width);
        prop_assert!(code <= beta.max_code());
    }

    #[test]
    fn container_round_trips((m, data) in layout_and_data(6), family in family(), beta in bits()) {
        let enc = encode_dataset(&data, m, beta, family, &quick()).unwrap();
        let mut bytes = Vec::new();
        write_nvq(&mut bytes, &enc.meta, &enc.vectors).unwrap();
        prop_assert_eq!(bytes.len() as u64, nvq_file_size(data.dim(), data.len(), m, beta));
        let (meta, vectors) = read_nvq(&bytes[..]).unwrap();
        prop_assert_eq!(meta, enc.meta);
        prop_assert_eq!(vectors, enc.vectors);
    }

    #[test]
    fn vecs_round_trip(d in 1usize..9, rows in prop::collection::vec(prop::collection::vec(any::<i32>(), 8), 1..6)) {
        let rows: Vec<Vec<i32>> = rows.into_iter().map(|r| r[..d].to_vec()).collect();
        let set = VecSet::from_rows(&rows).unwrap();
        let mut bytes = Vec::new();
        write_vecs(&mut bytes, &set).unwrap();
        prop_assert_eq!(bytes.len(), rows.len() * (4 + 4 * d));
        let back: VecSet<i32> = read_vecs(&bytes[..]).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn partition_regroups_to_centered_vector((m, data) in layout_and_data(3), seed in any::<u64>()) {
        let meta = DatasetMeta::for_dataset(&data, m, Bits::EIGHT, NonlinearityFamily::Nqt, seed).unwrap();
        prop_assert_eq!(&meta.permutation, &make_partition(data.dim(), m, seed).unwrap());
        let x = data.row(0);
        let subs = meta.centered_subvectors(x).unwrap();
        prop_assert_eq!(subs.len(), m);
        let mut back = vec![f64::NAN; data.dim()];
        for (idx, sub) in meta.permutation.chunks(meta.subvector_len()).zip(&subs) {
            for (&i, &v) in idx.iter().zip(sub) {
                back[i as usize] = v;
            }
        }
        for (j, &b) in back.iter().enumerate() {
            prop_assert_eq!(b, x[j] as f64 - meta.mean[j] as f64);
        }
    }

    #[test]
    fn quantized_dot_is_linear_in_the_query(
        (m, data) in layout_and_data(2), family in family(), a in -2.0f32..2.0, b in -2.0f32..2.0,
        seed in 0u64..1000,
    ) {
        let enc = encode_dataset(&data, m, Bits::FOUR, family, &quick()).unwrap();
        let d = data.dim();
        let q1: Vec<f32> = (0..d).map(|i| ((seed as usize + 7 * i) % 13) as f32 / 6.0 - 1.0).collect();
        let q2: Vec<f32> = (0..d).map(|i| ((seed as usize + 3 * i) % 11) as f32 / 5.0 - 1.0).collect();
        let mix: Vec<f32> = q1.iter().zip(&q2).map(|(x, y)| a * x + b * y).collect();
        let ev = &enc.vectors[0];
        let lhs = quantized_dot(&mix, ev, &enc.meta).unwrap();
        let rhs = a as f64 * quantized_dot(&q1, ev, &enc.meta).unwrap()
            + b as f64 * quantized_dot(&q2, ev, &enc.meta).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-5 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn fitted_vectors_never_lose_to_uniform((m, data) in layout_and_data(3), family in family(), beta in bits()) {
        let enc = encode_dataset(&data, m, beta, family, &quick()).unwrap();
        for (i, ev) in enc.vectors.iter().enumerate() {
            let subs = enc.meta.centered_subvectors(data.row(i)).unwrap();
            for (v, h) in subs.iter().zip(&ev.subvectors) {
                if h.is_constant() {
                    continue;
                }
                let q = Quantizer::new(h.params, h.interval, beta).unwrap();
                prop_assert!(q.loss(v) <= uniform_loss(v, h.interval, beta) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn map_is_bounded_by_recall(
        scores in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 12), 1..5),
        noise in prop::collection::vec(-0.3f64..0.3, 12),
        k in 1usize..12,
    ) {
        let ground: Vec<QueryResult> = scores.iter().map(|s| top_k(s, k).unwrap()).collect();
        let approx: Vec<QueryResult> = scores
            .iter()
            .map(|s| top_k(&s.iter().zip(&noise).map(|(a, b)| a + b).collect::<Vec<_>>(), k).unwrap())
            .collect();
        let recall = recall_at_k(&ground, &approx, k).unwrap();
        let map = map_at_k(&ground, &approx, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&recall));
        prop_assert!(map >= 0.0 && map <= recall + 1e-12);
        prop_assert_eq!(recall_at_k(&ground, &ground, k).unwrap(), 1.0);
        prop_assert!((map_at_k(&ground, &ground, k).unwrap() - 1.0).abs() < 1e-12);
    }
}
