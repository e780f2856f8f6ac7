//! Monte Carlo reference values for the noncentral t and F CDFs.
//!
//! Simulates each statistic from its definition with `rand_distr` samplers and
//! records the empirical CDF at randomized parameter points together with its
//! binomial standard error. The output is frozen into
//! `tests/fixtures/mc_oracle.json`:
//!
//! ```text
//! cargo run --release -p powerkit --example mc_oracle > crates/core/tests/fixtures/mc_oracle.json
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal, StudentT};
use rayon::prelude::*;
use serde_json::{json, Value};

const DRAWS: u64 = 10_000_000;
const POINTS: usize = 20;
const SEED: u64 = 20_261_018;

#[derive(Clone, Copy)]
enum Point {
    Nct { x: f64, df: f64, delta: f64 },
    Ncf { x: f64, df1: f64, df2: f64, lambda: f64 },
    TQuantile { p: f64, df: f64 },
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn points() -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = vec![
        Point::Nct {
            x: 2.0,
            df: 15.0,
            delta: 1.0,
        },
        Point::Ncf {
            x: 2.0,
            df1: 3.0,
            df2: 30.0,
            lambda: 5.0,
        },
        Point::TQuantile { p: 0.975, df: 26.0 },
    ];
    for _ in 0..POINTS {
        let df = round3(rng.random_range(2.0..60.0));
        let delta = round3(rng.random_range(-3.0..6.0));
        let x = round3(delta + rng.random_range(-2.5..2.5));
        out.push(Point::Nct { x, df, delta });
    }
    for _ in 0..POINTS {
        let df1 = rng.random_range(1..=8) as f64;
        let df2 = round3(rng.random_range(5.0..80.0));
        let lambda = round3(rng.random_range(0.5..30.0));
        let x = round3((df1 + lambda) / df1 * rng.random_range(0.3..1.7));
        out.push(Point::Ncf { x, df1, df2, lambda });
    }
    out
}

fn simulate(index: usize, point: Point) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    match point {
        Point::Nct { x, df, delta } => {
            let z = Normal::new(delta, 1.0).unwrap();
            let v = ChiSquared::new(df).unwrap();
            let hits = (0..DRAWS)
                .filter(|_| z.sample(&mut rng) / (v.sample(&mut rng) / df).sqrt() <= x)
                .count() as f64;
            let est = hits / DRAWS as f64;
            json!({"kind": "nct_cdf", "x": x, "df": df, "delta": delta,
                   "estimate": est, "std_error": (est * (1.0 - est) / DRAWS as f64).sqrt(), "draws": DRAWS})
        }
        Point::Ncf { x, df1, df2, lambda } => {
            // noncentral chi-square numerator: (Z + sqrt(λ))² + χ²(df1 - 1)
            let shift = lambda.sqrt();
            let rest = (df1 > 1.0).then(|| ChiSquared::new(df1 - 1.0).unwrap());
            let den = ChiSquared::new(df2).unwrap();
            let hits = (0..DRAWS)
                .filter(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let num = (z + shift).powi(2) + rest.map_or(0.0, |c| c.sample(&mut rng));
                    (num / df1) / (den.sample(&mut rng) / df2) <= x
                })
                .count() as f64;
            let est = hits / DRAWS as f64;
            json!({"kind": "ncf_cdf", "x": x, "df1": df1, "df2": df2, "lambda": lambda,
                   "estimate": est, "std_error": (est * (1.0 - est) / DRAWS as f64).sqrt(), "draws": DRAWS})
        }
        Point::TQuantile { p, df } => {
            let t = StudentT::new(df).unwrap();
            let mut draws: Vec<f64> = (0..DRAWS).map(|_| t.sample(&mut rng)).collect();
            let rank = (p * DRAWS as f64).ceil() as usize - 1;
            let (_, q, _) = draws.select_nth_unstable_by(rank, |a, b| a.total_cmp(b));
            json!({"kind": "t_quantile", "p": p, "df": df, "estimate": *q, "draws": DRAWS})
        }
    }
}

fn main() {
    let pts = points();
    let values: Vec<Value> = pts.par_iter().enumerate().map(|(i, p)| simulate(i, *p)).collect();
    let doc = json!({
        "seed": SEED,
        "generator": "rand_distr samplers, ChaCha8 streams per point",
        "points": values,
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
}
