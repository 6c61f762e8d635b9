use criterion::{black_box, criterion_group, criterion_main, Criterion};
use escrow_core::laws::{run_suite, LawSuiteConfig, Suite};
use escrow_core::{
    diamond, emon_unit, escrow_act, escrow_shape, make_comodule, AtomObj, ComonoidStr, Escrow,
    EscrowMonoidCtx, FinMap, Lens, ModuleStr, MonoidStr, Optic, OpticShape, TensorObj,
    VermittlerCtx,
};

fn range(name: &str, n: usize) -> TensorObj {
    AtomObj::range(name, n).into()
}

fn memory(x: &TensorObj) -> Escrow {
    let n = x.size();
    Escrow::from_maps(
        x,
        x,
        x.clone(),
        FinMap::from_fn(x.clone(), x.tensor(x), |v| v * n + v),
        FinMap::from_fn(x.tensor(x), x.clone(), |z| z / n),
    )
    .unwrap()
}

fn bench_diamond(c: &mut Criterion) {
    let x = range("X", 3);
    let k = memory(&x);
    c.bench_function("diamond memory |X|=3", |b| {
        b.iter(|| diamond(black_box(&k), black_box(&k)).unwrap())
    });
    let lenses: Vec<Escrow> = Lens::enumerate(&escrow_shape(&range("X", 2), &range("X", 2)))
        .unwrap()
        .map(|l| Escrow::new(l.to_optic()).unwrap())
        .collect();
    c.bench_function("diamond all 64x64 lens pairs |X|=2", |b| {
        b.iter(|| {
            for k in &lenses {
                for h in &lenses {
                    black_box(diamond(k, h).unwrap().optic().to_lens());
                }
            }
        })
    });
}

fn bench_to_lens(c: &mut Criterion) {
    let (s, a) = (range("S", 4), range("A", 3));
    let m = range("M", 4);
    let o = Optic::new(
        OpticShape::new(a.clone(), a.clone(), s.clone(), s.clone()),
        m.clone(),
        FinMap::from_fn(s.clone(), m.tensor(&a), |v| (v * 7) % 12),
        FinMap::from_fn(m.tensor(&a), s.clone(), |z| (z * 5) % 4),
    )
    .unwrap();
    c.bench_function("to_lens |S|=4 |A|=3 |M|=4", |b| {
        b.iter(|| black_box(&o).to_lens())
    });
}

fn bench_escrow_act(c: &mut Criterion) {
    let z3 = MonoidStr::cyclic(3);
    let cc = z3.carrier().clone();
    let a = range("A", 2);
    let module = ModuleStr::new(z3.clone(), cc.clone(), z3.mult_map().clone()).unwrap();
    let attr = FinMap::from_fn(cc.clone(), a.clone(), |x| x % 2);
    let comodule = make_comodule(ComonoidStr::new(a.clone()), cc.clone(), attr).unwrap();
    let ctx = VermittlerCtx::new(module, comodule).unwrap();
    let ectx = EscrowMonoidCtx::new(ComonoidStr::new(a.clone()), z3).unwrap();
    let h = emon_unit(&ectx);
    let shape = ctx.acted_shape();
    let o = Optic::new(
        shape.clone(),
        TensorObj::unit(),
        FinMap::constant(&a, &cc, 1),
        FinMap::identity(&cc),
    )
    .unwrap();
    c.bench_function("escrow_act Z3 on Z3", |b| {
        b.iter(|| escrow_act(&ctx, black_box(&h), black_box(&o)).unwrap())
    });
}

fn bench_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("law suites");
    group.sample_size(10);
    for suite in [Suite::Sliding, Suite::Lens, Suite::Tambara] {
        let cfg = LawSuiteConfig::only(&[suite]);
        group.bench_function(suite.name(), |b| b.iter(|| run_suite(suite, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_diamond,
    bench_to_lens,
    bench_escrow_act,
    bench_suite
);
criterion_main!(benches);
