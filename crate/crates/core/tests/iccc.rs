//! The ideal-ccc rewrite system: axiom-level examples, the derived
//! equation suite, and differential fuzzing of `equal` against the
//! rewrite-closure oracle.

use gtt_core::expr::{Expr, ExprId, RawExpr, Theory, World};
use gtt_core::iccc;
use gtt_core::rng::KernelRng;

fn b(r: RawExpr) -> Box<RawExpr> {
    Box::new(r)
}

/// Objects a, b, c; f, g : a → b parallel; h : b → c; k : a → b constant.
fn world() -> World {
    let mut w = World::new(Theory::Iccc);
    let a = w.declare_object("a").unwrap();
    let bb = w.declare_object("b").unwrap();
    let c = w.declare_object("c").unwrap();
    w.declare_gen("f", a, bb).unwrap();
    w.declare_gen("g", a, bb).unwrap();
    w.declare_gen("h", bb, c).unwrap();
    w.declare_const("k", a, bb).unwrap();
    w
}

fn e(w: &mut World, name: &str) -> ExprId {
    w.intern_raw(&RawExpr::Gen(name.into())).unwrap()
}

#[test]
fn type_absorption_source_side() {
    // f · (g̃ ⊢ a) with f : a → b collapses to (g̃ ⊢ b) unless f is constant.
    // Here the type edge runs from c into a.
    let mut w = world();
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    let c = e(&mut w, "c");
    let f = e(&mut w, "f");
    let edge = w.ent(c, a).unwrap();
    let lhs = w.comp(f, edge).unwrap();
    let expect = w.ent(c, bb).unwrap();
    assert_eq!(lhs, expect);
    // The identity case: f · (a ⊢ a) = f.
    let id_edge = w.ent(a, a).unwrap();
    let lhs = w.comp(f, id_edge).unwrap();
    assert_eq!(lhs, f);
    // Constants are protected.
    let k = e(&mut w, "k");
    let lhs = w.comp(k, edge).unwrap();
    assert!(matches!(w.node(lhs), Expr::Comp(..)), "constant-headed composite survives");
}

#[test]
fn type_absorption_target_side_has_no_constant_guard() {
    // (b ⊢ c̃) · g for g : a → b collapses to (a ⊢ c̃), even through constants.
    let mut w = world();
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    let c = e(&mut w, "c");
    let g = e(&mut w, "g");
    let k = e(&mut w, "k");
    let edge = w.ent(bb, c).unwrap();
    let lhs = w.comp(edge, g).unwrap();
    let expect = w.ent(a, c).unwrap();
    assert_eq!(lhs, expect);
    let lhs = w.comp(edge, k).unwrap();
    assert_eq!(lhs, expect, "axiom (4) carries no constant exception");
}

#[test]
fn good_pair_laws() {
    let mut w = world();
    let f = e(&mut w, "f");
    let g = e(&mut w, "g");
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    // π ⟨f, g⟩ = f and π′ ⟨f, g⟩ = g.
    let p = w.pair(f, g).unwrap();
    let pi = w.proj1(bb, bb).unwrap();
    let pi2 = w.proj2(bb, bb).unwrap();
    let l1 = w.comp(pi, p).unwrap();
    let l2 = w.comp(pi2, p).unwrap();
    assert_eq!(l1, f);
    assert_eq!(l2, g);
    // ⟨π h, π′ h⟩ = h for h into a wedge.
    let l = w.comp(pi, p).unwrap();
    let r = w.comp(pi2, p).unwrap();
    let back = w.pair(l, r).unwrap();
    assert_eq!(back, p);
    // ⟨f·π, g·π′⟩ = f ∧ g.
    let paa1 = w.proj1(a, a).unwrap();
    let paa2 = w.proj2(a, a).unwrap();
    let fp = w.comp(f, paa1).unwrap();
    let gp = w.comp(g, paa2).unwrap();
    let lhs = w.pair(fp, gp).unwrap();
    let rhs = w.wedge(f, g).unwrap();
    assert_eq!(lhs, rhs);
    // ⟨π, π′⟩ = 1 on the wedge.
    let lhs = w.pair(paa1, paa2).unwrap();
    let wa = w.wedge(a, a).unwrap();
    let one = w.id(wa).unwrap();
    assert_eq!(lhs, one);
}

#[test]
fn good_evaluation_laws() {
    let mut w = world();
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    let c = e(&mut w, "c");
    // f : c∧a → b, so f* : c → (a ⊢ b).
    let ca = w.wedge(c, a).unwrap();
    let f = w.declare_gen("fcab", ca, bb).unwrap();
    let fs = w.star(f).unwrap();
    let eab = w.ent(a, bb).unwrap();
    assert_eq!(w.source(fs), c);
    assert_eq!(w.target(fs), eab);
    // ε ⟨f*·π, π′⟩ = f.
    let p1 = w.proj1(c, a).unwrap();
    let p2 = w.proj2(c, a).unwrap();
    let fsp = w.comp(fs, p1).unwrap();
    let arg = w.pair(fsp, p2).unwrap();
    let ev = w.eval(a, bb).unwrap();
    let lhs = w.comp(ev, arg).unwrap();
    assert_eq!(lhs, f);
    // (ε ⟨g·π, π′⟩)* = g for g : c → (a ⊢ b).
    let g = w.declare_gen("gexp", c, eab).unwrap();
    let gp = w.comp(g, p1).unwrap();
    let arg = w.pair(gp, p2).unwrap();
    let inner = w.comp(ev, arg).unwrap();
    let lhs = w.star(inner).unwrap();
    assert_eq!(lhs, g);
    // ε* = 1 on the exponential.
    let lhs = w.star(ev).unwrap();
    let one = w.id(eab).unwrap();
    assert_eq!(lhs, one);
}

#[test]
fn basic_iccc_equations_hold_under_equal() {
    let mut w = world();
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    let c = e(&mut w, "c");
    let f = e(&mut w, "f");
    let g = e(&mut w, "g");
    let h = e(&mut w, "h");

    // (1) ⟨f, g⟩ · h = ⟨f·h, g·h⟩ for h into the common source.
    let loop_a = w.declare_gen("la", a, a).unwrap();
    let p = w.pair(f, g).unwrap();
    let lhs = w.comp(p, loop_a).unwrap();
    let fh = w.comp(f, loop_a).unwrap();
    let gh = w.comp(g, loop_a).unwrap();
    let rhs = w.pair(fh, gh).unwrap();
    assert!(iccc::equal(&mut w, lhs, rhs).unwrap());

    // (2) 1_a ∧ 1_b = 1_{a∧b}.
    let ia = w.id(a).unwrap();
    let ib = w.id(bb).unwrap();
    let lhs = w.wedge(ia, ib).unwrap();
    let wab = w.wedge(a, bb).unwrap();
    let rhs = w.id(wab).unwrap();
    assert!(iccc::equal(&mut w, lhs, rhs).unwrap());

    // (3) (f ∧ g) · (f′ ∧ g′) = (f·f′) ∧ (g·g′).
    let fg = w.wedge(h, h).unwrap();
    let ffgg = w.wedge(f, g).unwrap();
    let lhs = w.comp(fg, ffgg).unwrap();
    let hf = w.comp(h, f).unwrap();
    let hg = w.comp(h, g).unwrap();
    let rhs = w.wedge(hf, hg).unwrap();
    assert!(iccc::equal(&mut w, lhs, rhs).unwrap());

    // (4) ε* = 1.
    let ev = w.eval(a, bb).unwrap();
    let lhs = w.star(ev).unwrap();
    let eab = w.ent(a, bb).unwrap();
    let rhs = w.id(eab).unwrap();
    assert!(iccc::equal(&mut w, lhs, rhs).unwrap());

    // (5) f*·g = (f·⟨g·π, π′⟩)* whenever defined.
    let ca = w.wedge(c, a).unwrap();
    let fw = w.declare_gen("fw", ca, bb).unwrap();
    let gg = w.declare_gen("gg", bb, c).unwrap();
    let fstar = w.star(fw).unwrap();
    let lhs = w.comp(fstar, gg).unwrap();
    let pba = w.proj1(bb, a).unwrap();
    let pba2 = w.proj2(bb, a).unwrap();
    let gp = w.comp(gg, pba).unwrap();
    let arg = w.pair(gp, pba2).unwrap();
    let inner = w.comp(fw, arg).unwrap();
    let rhs = w.star(inner).unwrap();
    assert!(iccc::equal(&mut w, lhs, rhs).unwrap());
}

#[test]
fn free_structure_separates_generators() {
    let mut w = world();
    let f = e(&mut w, "f");
    let g = e(&mut w, "g");
    assert!(!iccc::equal(&mut w, f, g).unwrap());
}

#[test]
fn terminal_collapse_and_its_constant_exception() {
    let mut w = World::new(Theory::Iccc);
    let a = w.declare_object("a").unwrap();
    let top = w.top();
    let q = w.declare_gen("q", a, top).unwrap();
    let expect = w.ent(a, top).unwrap();
    assert_eq!(q, expect, "a map into top is the canonical edge");
    let kq = w.declare_const("kq", a, top).unwrap();
    assert!(matches!(w.node(kq), Expr::Gen(_)), "constants into top survive");
    assert_ne!(kq, expect);
}

#[test]
fn name_boundaries_and_recovery() {
    let mut w = world();
    let a = e(&mut w, "a");
    let bb = e(&mut w, "b");
    let f = e(&mut w, "f");
    let top = w.top();
    let nf = iccc::name(&mut w, f).unwrap();
    let eab = w.ent(a, bb).unwrap();
    assert_eq!(w.source(nf), top);
    assert_eq!(w.target(nf), eab);
    // ε ⟨⌜f⌝·π, π′⟩ · ⟨ter_a, 1_a⟩ recovers f.
    let pta = w.proj1(top, a).unwrap();
    let pta2 = w.proj2(top, a).unwrap();
    let nfp = w.comp(nf, pta).unwrap();
    let arg = w.pair(nfp, pta2).unwrap();
    let ev = w.eval(a, bb).unwrap();
    let big = w.comp(ev, arg).unwrap();
    let ter = w.ent(a, top).unwrap();
    let ia = w.id(a).unwrap();
    let mung = w.pair(ter, ia).unwrap();
    let got = w.comp(big, mung).unwrap();
    assert!(iccc::equal(&mut w, got, f).unwrap());
}

#[test]
fn morphisms_preserve_structure() {
    let mut src = world();
    let mut dst = world();
    let m = gtt_core::gencat::FiniteFunctorData::identity(&mut dst)
        .unwrap()
        .map;
    // Swap f and g.
    let mut data = gtt_core::gencat::FiniteFunctorData { map: m };
    let f_dst = e(&mut dst, "f");
    let g_dst = e(&mut dst, "g");
    data.map.insert(src.lookup_name("f").unwrap(), g_dst);
    data.map.insert(src.lookup_name("g").unwrap(), f_dst);

    let a = e(&mut src, "a");
    let bb = e(&mut src, "b");
    // F(π_{a,b}) = π_{F a, F b}.
    let p = src.proj1(a, bb).unwrap();
    let fp = iccc::apply_morphism(&data, &src, &mut dst, p).unwrap();
    let a_d = e(&mut dst, "a");
    let b_d = e(&mut dst, "b");
    let expect = dst.proj1(a_d, b_d).unwrap();
    assert_eq!(fp, expect);
    // F(f*) = F(f)* on a star.
    let c = e(&mut src, "c");
    let ca = src.wedge(c, a).unwrap();
    let fcab = src.declare_gen("fcab", ca, bb).unwrap();
    let c_d = e(&mut dst, "c");
    let ca_d = dst.wedge(c_d, a_d).unwrap();
    let fcab_d = dst.declare_gen("fcab", ca_d, b_d).unwrap();
    data.map.insert(src.lookup_name("fcab").unwrap(), fcab_d);
    let fs = src.star(fcab).unwrap();
    let lhs = iccc::apply_morphism(&data, &src, &mut dst, fs).unwrap();
    let rhs = dst.star(fcab_d).unwrap();
    assert_eq!(lhs, rhs);
    // Identity morphism is the identity.
    let idm = gtt_core::gencat::FiniteFunctorData::identity(&mut src).unwrap();
    let fsrc = e(&mut src, "f");
    let same = idm.apply_endo(&mut src, fsrc).unwrap();
    assert_eq!(same, fsrc);
}

// ----- differential fuzz against the closure oracle -------------------------

struct RawGen {
    pool: Vec<(RawExpr, ExprId, ExprId)>,
}

impl RawGen {
    fn new(w: &mut World) -> RawGen {
        let mut pool = Vec::new();
        for name in ["a", "b", "f", "g", "h", "k"] {
            let r = RawExpr::Gen(name.into());
            if let Ok(e) = w.intern_raw(&r) {
                pool.push((r, w.source(e), w.target(e)));
            }
        }
        pool.push((RawExpr::Top, w.top(), w.top()));
        RawGen { pool }
    }

    fn grow(&mut self, w: &mut World, rng: &mut KernelRng, steps: usize, max_size: usize) {
        for _ in 0..steps {
            let i = rng.below(self.pool.len());
            let j = rng.below(self.pool.len());
            let (x, _, _) = self.pool[i].clone();
            let (y, _, _) = self.pool[j].clone();
            let candidate = match rng.below(9) {
                0 => RawExpr::Comp(b(x), b(y)),
                1 => RawExpr::Pair(b(x), b(y)),
                2 => RawExpr::Wedge(b(x), b(y)),
                3 => RawExpr::Ent(b(x), b(y)),
                4 => RawExpr::Star(b(x)),
                5 => RawExpr::Id(b(x)),
                6 => RawExpr::Proj1(b(x), b(y)),
                7 => RawExpr::Proj2(b(x), b(y)),
                _ => RawExpr::Eval(b(x), b(y)),
            };
            if raw_size(&candidate) > max_size {
                continue;
            }
            if let Ok(e) = w.intern_raw(&candidate) {
                self.pool.push((candidate, w.source(e), w.target(e)));
            }
        }
    }
}

fn raw_size(r: &RawExpr) -> usize {
    match r {
        RawExpr::Gen(_) | RawExpr::Top => 1,
        RawExpr::Id(a) | RawExpr::Star(a) => 1 + raw_size(a),
        RawExpr::Comp(x, y)
        | RawExpr::Ent(x, y)
        | RawExpr::Wedge(x, y)
        | RawExpr::Pair(x, y)
        | RawExpr::Proj1(x, y)
        | RawExpr::Proj2(x, y)
        | RawExpr::Eval(x, y) => 1 + raw_size(x) + raw_size(y),
    }
}

#[test]
fn equal_validates_every_rewrite_edge() {
    // Every single-step rewrite instance is an equation of the theory, so
    // `equal` must return true across each edge. Since `equal` is an
    // equivalence, this gives agreement with closure-connectivity on the
    // whole explored graph.
    let mut w = world();
    let mut rng = KernelRng::seed_from_u64(0x5eed);
    let mut gen = RawGen::new(&mut w);
    gen.grow(&mut w, &mut rng, 4000, 9);

    let mut edges = 0;
    let mut failures = Vec::new();
    for (r, _, _) in gen.pool.clone() {
        let e = w.intern_raw(&r).unwrap();
        for n in gtt_core::oracle::one_step_rewrites(&mut w, &r, 40) {
            edges += 1;
            let en = w.intern_raw(&n).unwrap();
            if !iccc::equal(&mut w, e, en).unwrap() {
                failures.push((r.clone(), n));
            }
        }
    }
    assert!(edges >= 1500, "too few rewrite edges: {edges}");
    assert!(
        failures.is_empty(),
        "{} rewrite edges not validated by equal (of {edges}), first: {:#?}",
        failures.len(),
        &failures[..failures.len().min(6)]
    );
}

#[test]
fn unequal_pairs_are_not_closure_connected() {
    // The negative direction: where `equal` says false, a (capped) closure
    // exploration from both sides must not connect them. Uses constructed
    // parallel pairs plus sampled ones.
    let mut w = world();
    let f = e(&mut w, "f");
    let g = e(&mut w, "g");
    let h = e(&mut w, "h");
    let k = e(&mut w, "k");
    let a = e(&mut w, "a");
    let mut pairs: Vec<(ExprId, ExprId)> = vec![(f, g), (f, k), (g, k)];
    let hf = w.comp(h, f).unwrap();
    let hg = w.comp(h, g).unwrap();
    pairs.push((hf, hg));
    let pfg = w.pair(f, g).unwrap();
    let pgf = w.pair(g, f).unwrap();
    pairs.push((pfg, pgf));
    let wfg = w.wedge(f, g).unwrap();
    let wgf = w.wedge(g, f).unwrap();
    pairs.push((wfg, wgf));
    let nf = w.name_arrow(f).unwrap();
    let ng = w.name_arrow(g).unwrap();
    pairs.push((nf, ng));
    let ef = w.ent(a, f).unwrap();
    let eg = w.ent(a, g).unwrap();
    pairs.push((ef, eg));
    let idf = w.id(f).unwrap();
    let idg = w.id(g).unwrap();
    pairs.push((idf, idg));
    let big1 = w.pair(hf, hg).unwrap();
    let big2 = w.pair(hg, hf).unwrap();
    pairs.push((big1, big2));

    let mut checked = 0;
    let mut connected = Vec::new();
    for (x, y) in pairs {
        assert!(
            !iccc::equal(&mut w, x, y).unwrap(),
            "constructed pair unexpectedly equal: {} vs {}",
            w.render(x),
            w.render(y)
        );
        checked += 1;
        let rx = gtt_core::oracle::to_raw(&w, x);
        let ry = gtt_core::oracle::to_raw(&w, y);
        if gtt_core::oracle::closure_equal(&mut w, &rx, &ry).unwrap() {
            connected.push((rx, ry));
        }
    }
    assert!(checked >= 10, "too few unequal pairs: {checked}");
    assert!(
        connected.is_empty(),
        "closure connects pairs equal rejects: {:#?}",
        &connected[..connected.len().min(4)]
    );
}
