mod common;

use common::*;
use phidiv::exact::{band_constraints, cdf_exact, noe_probability};
use phidiv::rng::{sorted_uniforms, stream_rng};
use phidiv::statistics::{hc_star, sn, sn_plus, sn_unrestricted, sn_ur_plus, tn};
use phidiv::{DivergenceOrder, Sample};

fn ord(s: f64) -> DivergenceOrder {
    DivergenceOrder::new(s).unwrap()
}

#[test]
fn statistics_match_dense_grid_and_quadrature() {
    let mut rng = SplitMix(17);
    for trial in 0..12 {
        let n = 2 + trial % 9;
        let x = rng.sorted_sample(n);
        let sample = Sample::from_sorted(x.clone()).unwrap();
        for s in S_GRID {
            let o = ord(s);
            let got = sn(o, &sample).statistic;
            let want = sn_grid(s, &x, 1e-5);
            assert!(rel_err(got, want) < 1e-8, "sn s={s} n={n}: {got} vs {want}");
            let got = sn_plus(o, &sample, 0.5).unwrap().statistic;
            let want = sn_plus_grid(s, &x, 0.5, 1e-5);
            assert!(rel_err(got, want) < 1e-8, "sn_plus s={s} n={n}: {got} vs {want}");
            let got = tn(o, &sample).unwrap().statistic;
            let want = tn_quadrature(s, &x);
            assert!(rel_err(got, want) < 1e-8, "tn s={s} n={n}: {got} vs {want}");
        }
        // ⌊n/2⌋ ≥ 2 keeps the range [X_(1), X_(⌊n/2⌋)) nonempty.
        if n >= 4 {
            let got = hc_star(&sample, 0.5).unwrap().statistic;
            let want = hc_grid(&x, 0.5, 1e-5);
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-3), "hc n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn plotting_positions_match_grid_tightly() {
    for n in [5, 12] {
        let x: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let sample = Sample::from_sorted(x.clone()).unwrap();
        for s in S_GRID {
            let got = sn(ord(s), &sample).statistic;
            assert!(rel_err(got, sn_grid(s, &x, 1e-5)) < 1e-10, "s={s}");
        }
        for s in [0.25, 0.5, 0.75] {
            // Unrestricted: the whole of (0, 1).
            let got = sn_unrestricted(ord(s), &sample).unwrap().statistic;
            let want = DenseGrid::new(&x, 1e-5).range(0.0, 1.0, true).map(|(v, u)| kernel(s, u, v)).fold(0.0, f64::max);
            assert!(rel_err(got, want) < 1e-10, "ur s={s}");
            let plus = sn_ur_plus(ord(s), &sample).unwrap().statistic;
            assert!(plus <= got);
        }
    }
}

#[test]
fn documented_values() {
    let half = Sample::new(vec![0.5]).unwrap();
    assert!((sn(ord(2.0), &half).statistic - 0.5).abs() < 1e-12);
    assert!((tn(ord(2.0), &half).unwrap().statistic - (2f64.ln() - 0.5)).abs() < 1e-12);
    assert!((tn(ord(2.0), &half).unwrap().statistic - 0.193_147_2).abs() < 1e-7);
    let ur = sn_unrestricted(ord(0.5), &half).unwrap().statistic;
    assert!(ur >= 4.0 * (1.0 - 0.5f64.sqrt()) - 1e-12);

    let two = Sample::new(vec![0.1, 0.6]).unwrap();
    let want = 0.5 * 5f64.ln() + 0.5 * (5.0f64 / 9.0).ln();
    assert!((sn_plus(ord(1.0), &two, 0.5).unwrap().statistic - want).abs() < 1e-12);
    assert!((want - 0.511).abs() < 1e-3);
    let hc = hc_star(&two, 1.0).unwrap().statistic;
    assert!((hc - 2f64.sqrt() * 0.4 / 0.3).abs() < 1e-12);
}

#[test]
fn endpoint_reduction_survives_random_probes() {
    let mut rng = SplitMix(99);
    for _ in 0..20 {
        let n = 2 + (rng.next_u64() % 15) as usize;
        let x = rng.sorted_sample(n);
        let sample = Sample::from_sorted(x.clone()).unwrap();
        for s in S_GRID {
            let value = sn(ord(s), &sample).statistic;
            let (lo, hi) = if s >= 1.0 { (0.0, 1.0) } else { (x[0], x[n - 1]) };
            for _ in 0..1000 {
                let p = lo + (hi - lo) * rng.uniform();
                if p <= 0.0 || p >= 1.0 || p < lo || p >= hi {
                    continue;
                }
                let k = kernel(s, ecdf(&x, p), p);
                assert!(k <= value + 1e-10, "s={s}: probe {p} gives {k} > {value}");
            }
        }
    }
}

#[test]
fn noe_matches_simplex_integration() {
    let mut rng = SplitMix(5);
    for n in 1..=4 {
        for s in S_GRID {
            for _ in 0..3 {
                let lambda = 0.05 + 2.0 * rng.uniform();
                let band = band_constraints(n, ord(s), lambda).unwrap();
                let got = noe_probability(&band);
                let want = simplex_probability(band.lower(), band.upper());
                assert!((got - want).abs() < 1e-8, "n={n} s={s} λ={lambda}: {got} vs {want}");
            }
        }
    }
    // Arbitrary (non-kernel) bands as well.
    for _ in 0..20 {
        let n = 1 + (rng.next_u64() % 4) as usize;
        let mut a: Vec<f64> = (0..n).map(|_| 0.6 * rng.uniform()).collect();
        let mut b: Vec<f64> = (0..n).map(|_| 0.4 + 0.6 * rng.uniform()).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let band = phidiv::exact::OrderStatBand::new(a, b).unwrap();
        let got = noe_probability(&band);
        let want = simplex_probability(band.lower(), band.upper());
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}

#[test]
fn exact_cdf_agrees_with_simulation() {
    let n = 10;
    let reps = 20_000;
    for s in [-1.0, 0.5, 1.0, 2.0] {
        let o = ord(s);
        let stats: Vec<f64> = (0..reps)
            .map(|i| {
                let x = sorted_uniforms(&mut stream_rng(41, i), n);
                sn(o, &Sample::from_sorted(x).unwrap()).statistic
            })
            .collect();
        for lambda in [0.15, 0.3, 0.6] {
            let p = cdf_exact(n, o, lambda).unwrap();
            let hat = stats.iter().filter(|&&v| v <= lambda).count() as f64 / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((hat - p).abs() < 4.0 * se + 1e-12, "s={s} λ={lambda}: {hat} vs {p}");
        }
    }
}
