//! Sequential against parallel execution of the data-parallel loops.
//! Build with `--no-default-features` to see the sequential fallback.

use std::f64::consts::PI;
use std::hint::black_box;

use bell_bounds::polytope::{enumerate_vertices, hull_facets, HullBudget};
use bell_bounds::presets;
use bell_bounds::qops::{bell_operator, Angle, AngleMap};
use bell_bounds::sampling::{self, SweepConfig};
use bell_bounds::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sampling(c: &mut Criterion) {
    let angles: AngleMap = [(1, 0.0), (2, PI / 2.0), (3, PI / 4.0), (4, 3.0 * PI / 4.0)]
        .into_iter()
        .map(|(k, t)| (k, Angle(t)))
        .collect();
    let o = bell_operator(&presets::ch_inequality(), &angles, &presets::clauser_horne()).unwrap();
    let mut g = c.benchmark_group("sampled_extremes_20k");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sampling::sampled_extremes(black_box(&o), 20_000, 1, 0, exec))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep_101x1000");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = SweepConfig {
            ineq: presets::ch_inequality(),
            structure: presets::clauser_horne(),
            schedule: presets::ch_sweep_schedule(),
            grid: sampling::theta_grid(0.0, PI, 101).unwrap(),
            n_samples: 1000,
            seed: 1,
            exec,
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sampling::sweep(black_box(&cfg)).unwrap())
        });
    }
    g.finish();
}

fn hull(c: &mut Criterion) {
    let s = presets::three_by_three();
    let v = enumerate_vertices(&s).unwrap();
    let mut g = c.benchmark_group("hull_3x3");
    g.sample_size(10);
    for (name, exec) in MODES {
        let budget = HullBudget {
            exec,
            ..HullBudget::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| hull_facets(black_box(&s), &v, &budget).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sampling, sweep, hull);
criterion_main!(benches);
