use std::time::Duration;

use cayley_chid::exec::Execution;
use cayley_chid::harness::{run_experiment, ExperimentConfig, ExperimentKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench(c: &mut Criterion) {
    let cases = [
        (ExperimentKind::Triple, "25", 0.5, 64),
        (ExperimentKind::AutSmall, "29", 0.5, 32),
        (ExperimentKind::ChiD, "3,3", 0.4, 16),
    ];
    let mut g = c.benchmark_group("trials");
    for (kind, group, p, trials) in cases {
        let mut config = ExperimentConfig::new(kind, group.parse().unwrap(), p, trials, 7);
        for (label, execution) in [("serial", Execution::Serial), ("parallel", Execution::Parallel(None))] {
            config.execution = execution;
            let id = BenchmarkId::new(format!("{}/{group}", kind.name()), label);
            g.bench_with_input(id, &config, |b, config| {
                b.iter(|| run_experiment(config).unwrap());
            });
        }
    }
    g.finish();
}

criterion_group!(
    name = group;
    config = Criterion::default()
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(2))
        .sample_size(10);
    targets = bench
);

criterion_main!(group);
