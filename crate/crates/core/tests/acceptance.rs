//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{
    action, chain_free, c_tree, expr_stream, pga_tree, rand_c, rand_cg, rand_pga, rand_pga_expr, rand_spec, rng,
    spec_tree, term_stream,
};
use inseq::c::{c_to_cp, cp_to_c, CpInSeq, CpInstr};
use inseq::cg::{from_general, rel_block_len, rel_k, to_directional};
use inseq::expressiveness::{
    construct_inseq, elim_backward_to_minimal, gen_a_plus_n_thread, gen_c_tree, gen_cg_tree, jump_counters, CounterSet,
};
use inseq::pga::{fst, snd};
use inseq::translate::{
    c2cg, c2cg_hom, c2cg_positional, c2pga, cg2c, cg2c_hom, eliminate_backward, highway_block_len, pga2c,
};
use inseq::{CInSeq, CInstr, CgInSeq, CgInstr, Dir, PgaTerm, ThreadSpec};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took <= limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn spec(s: &str) -> ThreadSpec {
    s.parse().unwrap()
}

fn c(s: &str) -> CInSeq {
    s.parse().unwrap()
}

fn cg(s: &str) -> CgInSeq {
    s.parse().unwrap()
}

fn same(got: &ThreadSpec, want: &ThreadSpec, what: &str) -> Result<(), String> {
    check(got.bisimilar(want), || format!("{what}: got\n{}\nwant\n{want}", got.minimize()))
}

fn positions(len: usize) -> impl Iterator<Item = i64> {
    0..=len as i64 + 1
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a_d = spec("P0 = a . P1; P1 = D");
    let s = ThreadSpec::halt();
    let d = ThreadSpec::dead();

    let x = c("/a");
    same(&x.left(), &a_d, "C /a left")?;
    same(&x.right(), &a_d, "C /a right")?;
    let x = c("/a;+/a;!;\\#3");
    let p = spec("P0 = a . P1; P1 = a ? P2 : P0; P2 = S");
    same(&x.left(), &p, "C /a;+/a;!;\\#3 left")?;
    same(&x.right(), &p, "C /a;+/a;!;\\#3 right")?;
    let x = c("+/b;-/c;-\\c");
    let p1 = spec("P0 = b ? P1 : P2; P1 = c ? P3 : P2; P2 = c ? P0 : P1; P3 = D");
    let p3 = spec("P0 = c ? P1 : P2; P1 = b ? P2 : P0; P2 = c ? P3 : P0; P3 = D");
    same(&x.left(), &p1, "C +/b;-/c;-\\c left")?;
    same(&x.right(), &p3, "C +/b;-/c;-\\c right")?;
    let x = c("\\#2;-\\c");
    same(&x.left(), &d, "C \\#2;-\\c left")?;
    same(&x.right(), &spec("P0 = c . P1; P1 = D"), "C \\#2;-\\c right")?;
    let x = c("/#3;\\#1;!;\\#2;#;+\\a");
    same(&x.left(), &d, "C jump loop left")?;
    same(&x.right(), &a_d, "C jump loop right")?;

    let table = [
        ("+/a;#", a_d.clone(), d.clone()),
        ("/b;/G0;/a;/L0;!", spec("P0 = b . P1; P1 = S"), s.clone()),
        ("/b;/L3;+/a;\\G3", spec("P0 = b . P1; P1 = a . P2; P2 = D"), d.clone()),
        ("\\L5;-\\c", d.clone(), spec("P0 = c . P1; P1 = D")),
    ];
    for (src, left, right) in &table {
        let x = cg(src);
        same(&x.left(), left, &format!("Cg {src} left"))?;
        same(&x.right(), right, &format!("Cg {src} right"))?;
    }
    same(&cg("/L1;\\L2").left(), &d, "Cg /L1;\\L2 left")?;
    let a_loop = ThreadSpec::action_loop(action(0));
    same(&cg("/L5;\\a").left(), &a_loop, "Cg /L5;\\a left")?;
    same(&cg("/L5;\\a").right(), &a_loop, "Cg /L5;\\a right")?;

    let pga = [
        ("a", a_d.clone()),
        ("+b;#3", spec("P0 = b . P1; P1 = D")),
        ("-c;-c;(-a)^w", spec("P0 = c ? P2 : P1; P1 = c ? P2 : P2; P2 = a ? P2 : P2")),
        ("(#3;a;b)^w", d.clone()),
    ];
    for (src, want) in &pga {
        let t: PgaTerm = src.parse().unwrap();
        same(&t.behavior(), want, &format!("PGA {src}"))?;
    }
    same(&cg("/G3;/L3;/a;/b").rel_behavior_at(1, 7), &spec("P0 = b . P1; P1 = D"), "relative /G3;/L3;/a;/b")?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("27 golden behaviors in {:.0?}", start.elapsed()))
}

/// Goto numbers reduced modulo `k + 1`.
fn gotos_at_most(x: &CgInSeq, k: usize) -> CgInSeq {
    x.expand(|u| match u {
        CgInstr::Goto(d, l) => vec![CgInstr::Goto(*d, l % (k + 1))],
        u => vec![u.clone()],
    })
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    for case in 0..1000 {
        let x = rand_c(&mut r, 10, 6);
        let ctx = |what: &str| format!("case {case} {what} on {x}");
        let y = c2cg(&x);
        check(y.left().bisimilar(&x.left()) && y.right().bisimilar(&x.right()), || ctx("c2cg"))?;
        let k = x.max_jump().max(2) + r.gen_range(0..3);
        let y = c2cg_positional(&x, k).unwrap();
        check(y.left().bisimilar(&x.left()) && y.right().bisimilar(&x.right()), || ctx("c2cg_positional"))?;
        for k in 2..=4 {
            let small = rand_c(&mut r, 10, k);
            let y = c2cg_hom(&small, k).unwrap();
            let b = rel_block_len(k) as i64;
            for i in positions(small.len()) {
                let want = small.behavior_at(i);
                check(
                    want.bisimilar(&y.behavior_at(b * (i - 1) + 1)) && want.bisimilar(&y.behavior_at(b * i)),
                    || format!("case {case} c2cg_hom k={k} i={i} on {small}"),
                )?;
            }
        }
        let t = c2pga(&x);
        check(t.behavior().bisimilar(&x.left()), || ctx("c2pga"))?;

        let g = rand_cg(&mut r, 10, 6);
        let y = cg2c(&g);
        for i in positions(g.len()) {
            check(g.behavior_at(i).bisimilar(&y.behavior_at(i)), || format!("case {case} cg2c i={i} on {g}"))?;
        }
        for k in 0..=3 {
            let gk = gotos_at_most(&g, k);
            let y = cg2c_hom(&gk, k).unwrap();
            let b = highway_block_len(k) as i64;
            for i in positions(gk.len()) {
                check(gk.behavior_at(i).bisimilar(&y.behavior_at((i - 1) * b + 1)), || {
                    format!("case {case} cg2c_hom k={k} i={i} on {gk}")
                })?;
            }
        }
        let t = rand_pga(&mut r);
        check(pga2c(&t).left().bisimilar(&t.behavior()), || format!("case {case} pga2c on {t}"))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("1000 C and 1000 Cg inputs, 1000 PGA terms, all routes preserved in {:.1?}", start.elapsed()))
}

fn rand_cp(r: &mut impl Rng) -> CpInSeq {
    let len = r.gen_range(1..=10);
    let instrs = (0..len)
        .map(|_| {
            let a = action(r.gen_range(0..3));
            let d = if r.gen() { Dir::Fwd } else { Dir::Bwd };
            match r.gen_range(0..6) {
                0 => CpInstr::Basic(d, a),
                1 => CpInstr::Pos(a),
                2 => CpInstr::Neg(a),
                3 => CpInstr::Jump(d, r.gen_range(1..=6)),
                4 => CpInstr::Abort,
                _ => CpInstr::Halt,
            }
        })
        .collect();
    CpInSeq::new(instrs).unwrap()
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    for case in 0..500 {
        let x = rand_c(&mut r, 10, 6);
        let y = eliminate_backward(&x);
        check(y.len() == 3 * x.len(), || format!("case {case} eliminate_backward length"))?;
        for i in positions(x.len()) {
            check(x.behavior_at(i).bisimilar(&y.behavior_at(3 * (i - 1) + 1)), || {
                format!("case {case} eliminate_backward i={i} on {x}")
            })?;
        }
        let y = c_to_cp(&x);
        for i in positions(x.len()) {
            let want = x.behavior_at(i);
            check(want.bisimilar(&y.behavior_at(5 * (i - 1) + 1)) && want.bisimilar(&y.behavior_at(5 * i)), || {
                format!("case {case} c_to_cp i={i} on {x}")
            })?;
        }
        let p = rand_cp(&mut r);
        let y = cp_to_c(&p);
        for i in positions(p.len()) {
            let want = p.behavior_at(i);
            check(want.bisimilar(&y.behavior_at(4 * (i - 1) + 1)) && want.bisimilar(&y.behavior_at(4 * i)), || {
                format!("case {case} cp_to_c i={i} on {p}")
            })?;
        }
        check(elim_backward_to_minimal(&x).left().bisimilar(&x.left()), || {
            format!("case {case} elim_backward_to_minimal on {x}")
        })?;

        let g = rand_cg(&mut r, 10, 6);
        let l = r.gen_range(0..8);
        let mut ls: Vec<usize> = (0..r.gen_range(1..4)).map(|_| r.gen_range(0..8)).collect();
        ls.sort_unstable();
        let variants = [("free_one", g.free_one(l)), ("free_seq", g.free_seq(&ls)), ("to_lnf", g.to_lnf())];
        for i in positions(g.len()) {
            let want = g.behavior_at(i);
            for (name, v) in &variants {
                check(want.bisimilar(&v.behavior_at(i)), || format!("case {case} {name} i={i} on {g}"))?;
            }
            check(want.bisimilar(&to_directional(&g).general_behavior_at(i)), || {
                format!("case {case} to_directional i={i} on {g}")
            })?;
        }
        let t = from_general(&g);
        for i in positions(g.len()) {
            check(g.general_behavior_at(i).bisimilar(&t.program.behavior_at(t.position(i))), || {
                format!("case {case} from_general i={i} on {g}")
            })?;
        }
        let k = r.gen_range(2..=4);
        let y = rel_k(&g, k).unwrap();
        let b = rel_block_len(k) as i64;
        for i in positions(g.len()) {
            let want = g.rel_behavior_at(i, k);
            check(want.bisimilar(&y.behavior_at(b * (i - 1) + 1)) && want.bisimilar(&y.behavior_at(b * i)), || {
                format!("case {case} rel_{k} i={i} on {g}")
            })?;
        }
    }
    Ok("500 cases each: eliminate_backward, c_to_cp, cp_to_c, minimal set, free, to_lnf, to_directional, rel_k".into())
}

/// Label target of the goto at `i` by direct scanning; `None` for orphans.
fn scan_target(x: &CgInSeq, i: usize) -> Option<usize> {
    let xs = x.instrs();
    match &xs[i] {
        CgInstr::Goto(Dir::Fwd, l) => (i + 1..xs.len()).find(|&j| xs[j] == CgInstr::Label(Dir::Fwd, *l)),
        CgInstr::Goto(Dir::Bwd, l) => (0..i).rev().find(|&j| xs[j] == CgInstr::Label(Dir::Bwd, *l)),
        _ => None,
    }
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    for case in 0..500 {
        let g = rand_cg(&mut r, 12, 4);
        let y = g.to_lnf();
        check(y.is_lnf(), || format!("case {case}: to_lnf({g}) = {y} is not in LNF"))?;
        let xs = y.instrs();
        for (i, u) in xs.iter().enumerate() {
            if let CgInstr::Goto(d, l) = u {
                for (j, v) in xs.iter().enumerate() {
                    if *v == CgInstr::Label(*d, *l) {
                        check(scan_target(&y, i) == Some(j), || {
                            format!("case {case}: goto at {} does not target its label at {} in {y}", i + 1, j + 1)
                        })?;
                    }
                    if v == u && j != i {
                        check(scan_target(&y, i) == scan_target(&y, j), || {
                            format!("case {case}: identical gotos at {} and {} differ in target in {y}", i + 1, j + 1)
                        })?;
                    }
                }
            }
            if let CgInstr::Label(..) = u {
                check(xs.iter().filter(|v| *v == u).count() == 1, || format!("case {case}: label {u} repeated in {y}"))?;
            }
        }
    }
    Ok("500 normalized inputs satisfy LNF and properties (a), (b), (c)".into())
}

fn criterion_5() -> Outcome {
    let profiles = [
        ("evens>=4", CounterSet::every(2, 4, 0).unwrap()),
        ("multiples of 3 >= 6", CounterSet::every(3, 6, 0).unwrap()),
        ("1 mod 4 from 5 plus {4}", CounterSet::every(4, 5, 1).unwrap().with_extras([4]).unwrap()),
    ];
    let mut r = rng(5);
    let mut slowest = Duration::ZERO;
    for case in 0..200 {
        let p = rand_spec(&mut r, 6);
        for (name, set) in &profiles {
            let start = Instant::now();
            let x = construct_inseq(&p, set, set);
            let ok = x.left().bisimilar(&p);
            let took = start.elapsed();
            slowest = slowest.max(took);
            check(ok, || format!("case {case} profile {name}: behavior differs for\n{p}"))?;
            let (f, b) = jump_counters(&x);
            check(f.iter().chain(&b).all(|&k| set.contains(k)), || format!("case {case} profile {name}: counter outside set"))?;
            check(took <= Duration::from_secs(1), || format!("case {case} profile {name}: took {took:.2?}"))?;
        }
    }
    Ok(format!("600 constructions audited and bisimilar, slowest {slowest:.1?}"))
}

fn criterion_6() -> Outcome {
    let a = action(0);
    for n in 1..=6 {
        let x = gen_c_tree(&a, n);
        check(x.exits().len() == 1 << n, || format!("tree({n}) has {} exits", x.exits().len()))?;
        let reach = x.reachable(1);
        check((1..=x.len() as i64).all(|p| reach.contains(&p)), || format!("tree({n}) not fully reachable"))?;
        let mut landings = BTreeSet::new();
        for replies in 0..1usize << n {
            let mut p = 1i64;
            for d in 0..n {
                p += if (replies >> d) & 1 == 1 { 1 } else { 2 };
                if d + 1 < n {
                    match x.inst(p) {
                        Some(CInstr::Jump(Dir::Fwd, k)) => p += *k as i64,
                        other => return Err(format!("tree({n}) position {p} holds {other:?}")),
                    }
                }
            }
            check(x.exits().contains(&p), || format!("tree({n}) reply path {replies} lands on {p}"))?;
            landings.insert(p);
        }
        check(landings.len() == 1 << n, || format!("tree({n}) landings not distinct"))?;
        let g = gen_cg_tree(&a, n);
        let labels: BTreeSet<usize> = g.orphaned().iter().map(|&p| g.inst(p).unwrap().number().unwrap()).collect();
        let want: BTreeSet<usize> = (1 << n..1 << (n + 1)).collect();
        check(g.orphaned().len() == 1 << n && labels == want, || format!("cg tree({n}) orphans {labels:?}"))?;
    }
    for n in 1..=5 {
        let t = gen_a_plus_n_thread(&a, n);
        check(t.has_a_plus_n_property(&a, n), || format!("a+{n} thread lacks the property"))?;
        check(!t.has_a_plus_n_property(&a, n + 1), || format!("a+{n} thread has the a+{} property", n + 1))?;
    }
    Ok("exit/orphan counts for n <= 6, a+n property for n <= 5 (and not n+1)".into())
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    for case in 0..1000 {
        let t = rand_pga(&mut r);
        let s = snd(&t);
        check(snd(&s) == s, || format!("case {case}: snd not idempotent on {t}"))?;
        check(chain_free(&s), || format!("case {case}: snd({t}) = {s} has chained jumps"))?;
        check(s.behavior().bisimilar(&t.behavior()), || format!("case {case}: snd changes behavior of {t}"))?;
        let e = rand_pga_expr(&mut r, 4);
        let f = fst(&e).map_err(|err| format!("case {case}: fst failed on {e}: {err}"))?;
        let (stream, _) = expr_stream(&e, 400);
        let b = f.behavior();
        for d in 0..6 {
            check(spec_tree(&b, d) == pga_tree(&stream, d), || format!("case {case}: fst({e}) = {f} differs at depth {d}"))?;
        }
        let stream = term_stream(&t, 400);
        for d in 0..6 {
            check(spec_tree(&t.behavior(), d) == pga_tree(&stream, d), || format!("case {case}: extraction of {t} at depth {d}"))?;
        }
    }
    Ok("1000 terms: snd idempotent, chain-free, behavior-preserving; fst preserving on 1000 parse trees".into())
}

fn all_c_instrs() -> Vec<CInstr> {
    let a = action(0);
    let mut out = Vec::new();
    for d in [Dir::Fwd, Dir::Bwd] {
        out.push(CInstr::Basic(d, a.clone()));
        out.push(CInstr::Pos(d, a.clone()));
        out.push(CInstr::Neg(d, a.clone()));
        out.extend((1..=3).map(|k| CInstr::Jump(d, k)));
    }
    out.push(CInstr::Abort);
    out.push(CInstr::Halt);
    out
}

fn criterion_8() -> Outcome {
    let alphabet = all_c_instrs();
    let mut programs: Vec<Vec<CInstr>> = alphabet.iter().map(|u| vec![u.clone()]).collect();
    let mut frontier = programs.clone();
    for _ in 1..3 {
        frontier = frontier
            .iter()
            .flat_map(|p| alphabet.iter().map(move |u| [p.clone(), vec![u.clone()]].concat()))
            .collect();
        programs.extend(frontier.iter().cloned());
    }
    let mut checked = 0;
    for p in &programs {
        let x = CInSeq::new(p.clone()).unwrap();
        let depth = 2 * p.len() + 2;
        for i in positions(p.len()) {
            let got = x.behavior_at(i);
            for d in 0..=depth {
                check(spec_tree(&got, d) == c_tree(p, i, d), || format!("{x} at {i}: depth {d} projections differ"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{} programs, {checked} (program, position) pairs agree with the unrolled equations", programs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden behaviors", criterion_1),
        ("translation preservation", criterion_2),
        ("endomorphism suites", criterion_3),
        ("LNF postconditions", criterion_4),
        ("restricted-counter construction", criterion_5),
        ("gadget counts", criterion_6),
        ("snd/fst", criterion_7),
        ("oracle cross-check", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {why}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
