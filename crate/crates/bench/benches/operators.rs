use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use multiform::de::{DeParams, SubPopulation};
use multiform::embedding::{make_embedding_matrix, Formulation};
use multiform::transfer::{build_mapping, fit_mapping, pair_populations};
use multiform::{BaseFunctionId, EmbeddedObjective, RunConfig, VariantId};
use nalgebra::DMatrix;
use rand::{Rng as _, SeedableRng};

fn rng(seed: u64) -> multiform::Rng {
    multiform::Rng::seed_from_u64(seed)
}

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for dim in [200usize, 1000] {
        let mut r = rng(0);
        let mut obj =
            EmbeddedObjective::random(BaseFunctionId::Rastrigin, dim, 10, &mut r).unwrap();
        let form =
            Formulation::embedded(0, make_embedding_matrix(dim, 20, &mut r).unwrap()).unwrap();
        let y: Vec<f64> = (0..20).map(|_| r.random_range(-1.0..1.0)).collect();
        group.bench_function(format!("embedded_d20_D{dim}"), |b| {
            b.iter(|| form.evaluate(&mut obj, &y).unwrap())
        });
    }
    group.finish();
}

fn mapping(c: &mut Criterion) {
    let mut r = rng(1);
    let mut obj = EmbeddedObjective::random(BaseFunctionId::Ackley, 200, 10, &mut r).unwrap();
    let emb = Formulation::embedded(0, make_embedding_matrix(200, 20, &mut r).unwrap()).unwrap();
    let orig = Formulation::original(1, 200);
    let p_emb = SubPopulation::init(&emb, 20, &mut obj, &mut r).unwrap();
    let p_orig = SubPopulation::init(&orig, 20, &mut obj, &mut r).unwrap();
    let (a_e, a_o) = pair_populations(&p_emb, &p_orig).unwrap();
    c.bench_function("mapping/original_to_embedded_ridge", |b| {
        b.iter(|| fit_mapping(&a_o, &a_e, 1e-6).unwrap())
    });
    let square = DMatrix::from_fn(20, 40, |_, _| r.random_range(-1.0..1.0));
    c.bench_function("mapping/square_exact", |b| {
        b.iter(|| build_mapping(&square, &square, 0.0).unwrap())
    });
}

fn generation(c: &mut Criterion) {
    let mut r = rng(2);
    let obj = EmbeddedObjective::random(BaseFunctionId::Griewank, 200, 10, &mut r).unwrap();
    let form = Formulation::original(0, 200);
    let mut init_obj = obj.fresh_copy();
    let pop = SubPopulation::init(&form, 100, &mut init_obj, &mut r).unwrap();
    c.bench_function("de/generation_K100_D200", |b| {
        b.iter_batched(
            || (pop.clone(), obj.fresh_copy(), rng(3)),
            |(mut p, mut o, mut g)| {
                p.generation(100, DeParams::default(), &mut o, &form, &mut g)
                    .unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

fn full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    let mut cfg = RunConfig::new(BaseFunctionId::Ackley, 200, 10, vec![20; 4], VariantId::SMF);
    cfg.max_fes = 5_000;
    group.bench_function("de+mf_D200_5k_fes", |b| {
        b.iter(|| multiform::orchestrator::run(&cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, evaluation, mapping, generation, full_run);
criterion_main!(benches);
