use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use oe_bench::{f2_ball, lemma2, w0_points};
use oe_core::constructions::{check_section, FiniteAction, TheoremB};
use oe_core::verify::{lemma_indep_check, LemmaIndepInstance};
use oe_core::{Configuration, FiniteGroup, Word};

fn words(c: &mut Criterion) {
    let (g, ball) = f2_ball(3);
    c.bench_function("f2 ball(3) all products", |b| {
        b.iter(|| {
            let mut n = 0usize;
            for u in &ball {
                for v in &ball {
                    n += g.mul(u, v).syllables().len();
                }
            }
            black_box(n)
        })
    });
    c.bench_function("f2 ball(4) enumeration", |b| b.iter(|| black_box(f2_ball(4).1.len())));
}

fn theorem_b(c: &mut Criterion) {
    let tb = TheoremB::new(FiniteGroup::cyclic(2), 2).unwrap();
    let x = Configuration::<Word>::sample(2, 3);
    c.bench_function("theorem-b theta radius 3", |b| b.iter(|| black_box(tb.theta(&x, 3).unwrap())));
    let family = tb.family(1).unwrap();
    let window = tb.group.ball(2, &oe_core::Length::Word, None).unwrap();
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    g.bench_function("theorem-b joint law 2^17", |b| b.iter(|| black_box(tb.joint_law(&family, &window, 1 << 24).unwrap())));
    g.finish();
}

fn lemma2_cocycle(c: &mut Criterion) {
    let l2 = lemma2();
    let omega = l2.omega().unwrap();
    let points = w0_points(&l2, 32);
    let g = l2.f2.parse("b a b^-1").unwrap();
    c.bench_function("lemma-2 omega(b a b^-1, x)", |b| {
        b.iter(|| {
            let mut resolved = 0;
            for x in &points {
                resolved += omega.evaluate(&g, x).is_ok() as u32;
            }
            black_box(resolved)
        })
    });
}

fn finite_checks(c: &mut Criterion) {
    let inst = LemmaIndepInstance {
        x_size: 2,
        x0_size: 2,
        h_action: vec![vec![0, 1], vec![1, 0]],
        index_size: 3,
        family: vec![vec![(0, 0), (1, 2)], vec![(1, 1), (0, 0)]],
    };
    c.bench_function("lemma-indep 16 points", |b| b.iter(|| black_box(lemma_indep_check(&inst, 1 << 20).unwrap())));
    let a = FiniteAction::free_copies(FiniteGroup::symmetric3(), 4, &(0..24).collect::<Vec<_>>()).unwrap();
    c.bench_function("appendix section S3 on 24 points", |b| b.iter(|| black_box(check_section(&a).unwrap())));
}

criterion_group!(benches, words, theorem_b, lemma2_cocycle, finite_checks);
criterion_main!(benches);
