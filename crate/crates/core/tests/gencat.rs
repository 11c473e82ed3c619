//! Generalized-category layer: boundaries, composition, the order closure,
//! and the finite-data law checkers.

use gtt_core::expr::{RawExpr, Theory, World};
use gtt_core::gencat::{self, ComponentMap, FiniteFunctorData};

fn raw(name: &str) -> RawExpr {
    RawExpr::Gen(name.into())
}

fn comp(f: RawExpr, g: RawExpr) -> RawExpr {
    RawExpr::Comp(Box::new(f), Box::new(g))
}

/// a, b, c objects with f : a → b, g : b → c, h : c → a.
fn chain_world() -> World {
    let mut w = World::new(Theory::Category);
    let a = w.declare_object("a").unwrap();
    let b = w.declare_object("b").unwrap();
    let c = w.declare_object("c").unwrap();
    w.declare_gen("f", a, b).unwrap();
    w.declare_gen("g", b, c).unwrap();
    w.declare_gen("h", c, a).unwrap();
    w
}

#[test]
fn source_of_composite_is_source_of_second_factor() {
    let mut w = chain_world();
    let gf = w.intern_raw(&comp(raw("g"), raw("f"))).unwrap();
    let a = w.intern_raw(&raw("a")).unwrap();
    let c = w.intern_raw(&raw("c")).unwrap();
    assert_eq!(w.source(gf), a);
    assert_eq!(w.target(gf), c);
}

#[test]
fn boundaries_of_identities_and_generators() {
    let mut w = chain_world();
    let a = w.intern_raw(&raw("a")).unwrap();
    let f = w.intern_raw(&raw("f")).unwrap();
    let b = w.intern_raw(&raw("b")).unwrap();
    let ia = w.id(a).unwrap();
    assert_eq!(ia, a, "objects are their own identities");
    assert_eq!(w.source(f), a);
    assert_eq!(w.target(f), b);
    // Identity of a non-object element.
    let i_f = w.id(f).unwrap();
    assert_eq!(w.source(i_f), f);
    assert_eq!(w.target(i_f), f);
}

#[test]
fn identity_laws_absorb() {
    let mut w = chain_world();
    let f = w.intern_raw(&raw("f")).unwrap();
    let fa = w.intern_raw(&comp(raw("f"), RawExpr::Id(Box::new(raw("a"))))).unwrap();
    let bf = w.intern_raw(&comp(RawExpr::Id(Box::new(raw("b"))), raw("f"))).unwrap();
    assert_eq!(fa, f);
    assert_eq!(bf, f);
}

#[test]
fn associativity_normalizes_identically() {
    let mut w = chain_world();
    let left = w
        .intern_raw(&comp(comp(raw("h"), raw("g")), raw("f")))
        .unwrap();
    let right = w
        .intern_raw(&comp(raw("h"), comp(raw("g"), raw("f"))))
        .unwrap();
    assert_eq!(left, right);
}

#[test]
fn random_chains_associate() {
    // All parenthesizations of composable chains of length ≤ 6 agree.
    let mut w = chain_world();
    let f = w.intern_raw(&raw("f")).unwrap();
    let g = w.intern_raw(&raw("g")).unwrap();
    let h = w.intern_raw(&raw("h")).unwrap();
    let cycle = [h, g, f];
    for len in 2..=6usize {
        // Build the chain h·g·f·h·... matching boundaries cyclically.
        let parts: Vec<_> = (0..len).map(|i| cycle[i % 3]).collect();
        // Left fold and right fold.
        let mut left = parts[len - 1];
        for &p in parts[..len - 1].iter().rev() {
            left = w.comp(p, left).unwrap();
        }
        let mut right = parts[0];
        for &p in &parts[1..] {
            right = w.comp(right, p).unwrap();
        }
        // `right` composed in the order target-most first equals left fold.
        // (parts[0] is outermost in `left`; rebuild right accordingly.)
        let mut acc = parts[0];
        for &p in &parts[1..] {
            acc = w.comp(acc, p).unwrap();
        }
        assert_eq!(left, acc);
        let _ = right;
    }
}

#[test]
fn composability_requires_boundary_match() {
    let mut w = chain_world();
    let f = w.intern_raw(&raw("f")).unwrap();
    assert!(w.comp(f, f).is_err(), "f·f has mismatched boundaries");
}

#[test]
fn declared_order_enables_composition() {
    let mut w = World::new(Theory::Category);
    let a = w.declare_object("a").unwrap();
    let b = w.declare_object("b").unwrap();
    let c = w.declare_object("c").unwrap();
    let f = w.declare_gen("f", a, b).unwrap();
    let g = w.declare_gen("g", c, a).unwrap();
    // Without order, f·g needs s(f) = t(g): a vs a — composable.
    assert!(w.comp(f, g).is_ok());
    // h : b' → c' with unrelated boundaries composes with f only after
    // declaring b ⪯ b'.
    let b2 = w.declare_object("b2").unwrap();
    let c2 = w.declare_object("c2").unwrap();
    let h = w.declare_gen("h", b2, c2).unwrap();
    assert!(w.comp(h, f).is_err());
    w.declare_order(b2, b).unwrap();
    // Composability needs s(h) ⪯ t(f): b2 ⪯ b. Declared.
    assert!(w.comp(h, f).is_ok());
}

#[test]
fn leq_is_reflexive_and_reads_back_declared_pairs() {
    let mut w = chain_world();
    let a = w.intern_raw(&raw("a")).unwrap();
    let b = w.intern_raw(&raw("b")).unwrap();
    assert!(w.leq(a, a));
    assert!(!w.leq(a, b));
    w.declare_order(a, b).unwrap();
    assert!(w.leq(a, b));
    assert!(!w.leq(b, a));
}

#[test]
fn order_congruence_lifts_to_identities() {
    // a ⪯ b implies 1_a ⪯ 1_b (Def. 2.1(7c)).
    let mut w = World::new(Theory::Category);
    let a = w.declare_object("a").unwrap();
    let b = w.declare_object("b").unwrap();
    let f = w.declare_gen("f", a, b).unwrap();
    let g = w.declare_gen("g", a, b).unwrap();
    w.declare_order(f, g).unwrap();
    let i_f = w.id(f).unwrap();
    let i_g = w.id(g).unwrap();
    assert!(w.leq(i_f, i_g));
    // And to boundaries: f ⪯ g forces s(f) ⪯ s(g) (trivially a ⪯ a here).
    assert!(w.leq(a, a));
}

#[test]
fn order_transitivity_and_antisymmetry() {
    let mut w = chain_world();
    let a = w.intern_raw(&raw("a")).unwrap();
    let b = w.intern_raw(&raw("b")).unwrap();
    let c = w.intern_raw(&raw("c")).unwrap();
    w.declare_order(a, b).unwrap();
    w.declare_order(b, c).unwrap();
    assert!(w.leq(a, c));
    // Closing the cycle identifies distinct normal forms: rejected.
    assert!(w.declare_order(c, a).is_err());
}

#[test]
fn one_dimensional_degeneration() {
    // On an all-object signature, st = t, tt = t, ss = s, ts = s.
    let mut w = chain_world();
    for name in ["f", "g", "h"] {
        let e = w.intern_raw(&raw(name)).unwrap();
        let s = w.source(e);
        let t = w.target(e);
        assert_eq!(w.source(t), t);
        assert_eq!(w.target(t), t);
        assert_eq!(w.source(s), s);
        assert_eq!(w.target(s), s);
    }
}

#[test]
fn identity_functor_has_no_violations() {
    let mut w = chain_world();
    let data = FiniteFunctorData::identity(&mut w).unwrap();
    let mut dst = chain_world();
    let report = gencat::check_functor(&data, &mut w, &mut dst, 32, 7).unwrap();
    assert!(report.ok(), "{:?}", report.violations);
}

#[test]
fn collapsing_functor_to_an_identity_is_lawful() {
    // Map f : a → b to 1_c where F(a) = F(b) = c; brute-force check of the
    // three functor equations over the finite generator set.
    let mut src = World::new(Theory::Category);
    let a = src.declare_object("a").unwrap();
    let b = src.declare_object("b").unwrap();
    src.declare_gen("f", a, b).unwrap();

    let mut dst = World::new(Theory::Category);
    let c = dst.declare_object("c").unwrap();
    let ic = dst.id(c).unwrap();

    let mut data = FiniteFunctorData::default();
    data.map.insert(src.lookup_name("a").unwrap(), c);
    data.map.insert(src.lookup_name("b").unwrap(), c);
    data.map.insert(src.lookup_name("f").unwrap(), ic);
    let report = gencat::check_functor(&data, &mut src, &mut dst, 16, 1).unwrap();
    assert!(report.ok(), "{:?}", report.violations);
}

#[test]
fn functor_with_inconsistent_boundaries_is_flagged() {
    let mut src = World::new(Theory::Category);
    let a = src.declare_object("a").unwrap();
    let b = src.declare_object("b").unwrap();
    src.declare_gen("f", a, b).unwrap();

    let mut dst = World::new(Theory::Category);
    let c = dst.declare_object("c").unwrap();
    let d = dst.declare_object("d").unwrap();
    let k = dst.declare_gen("k", c, d).unwrap();

    let mut data = FiniteFunctorData::default();
    data.map.insert(src.lookup_name("a").unwrap(), d);
    data.map.insert(src.lookup_name("b").unwrap(), c);
    data.map.insert(src.lookup_name("f").unwrap(), k);
    let report = gencat::check_functor(&data, &mut src, &mut dst, 4, 1).unwrap();
    assert!(!report.ok(), "boundary mismatch must be reported");
}

#[test]
fn identity_monad_satisfies_the_laws() {
    let mut w = chain_world();
    let t = FiniteFunctorData::identity(&mut w).unwrap();
    let mut eta = ComponentMap::new();
    let mut mu = ComponentMap::new();
    for name in ["a", "b", "c", "f", "g", "h"] {
        let e = w.intern_raw(&raw(name)).unwrap();
        let i = w.id(e).unwrap();
        eta.insert(e, i);
        mu.insert(e, i);
    }
    let report = gencat::check_monad_laws(&t, &eta, &mu, &mut w, 64).unwrap();
    assert!(report.ok(), "{:?}", report.violations);
}

#[test]
fn broken_mu_is_reported() {
    // μ at `a` replaced by a non-identity loop breaks the unit law.
    let mut w = World::new(Theory::Category);
    let a = w.declare_object("a").unwrap();
    let e = w.declare_gen("e", a, a).unwrap();
    let t = FiniteFunctorData::identity(&mut w).unwrap();
    let mut eta = ComponentMap::new();
    let mut mu = ComponentMap::new();
    let ia = w.id(a).unwrap();
    eta.insert(a, ia);
    mu.insert(a, e);
    let report = gencat::check_monad_laws(&t, &eta, &mu, &mut w, 16).unwrap();
    assert!(!report.ok());
}

#[test]
fn eta_naturality_failure_is_reported() {
    // A non-natural η: picks the identity at `a` but a loop at `b`.
    let mut w = World::new(Theory::Category);
    let a = w.declare_object("a").unwrap();
    let b = w.declare_object("b").unwrap();
    let f = w.declare_gen("f", a, b).unwrap();
    let l = w.declare_gen("l", b, b).unwrap();
    let t = FiniteFunctorData::identity(&mut w).unwrap();
    let mut eta = ComponentMap::new();
    let ia = w.id(a).unwrap();
    eta.insert(a, ia);
    eta.insert(b, l);
    eta.insert(f, f);
    let mu = ComponentMap::new();
    let report = gencat::check_monad_laws(&t, &eta, &mu, &mut w, 16).unwrap();
    assert!(!report.ok(), "η with a loop component is not natural");
}

#[test]
fn identity_adjunction_triangles_hold() {
    let mut wc = chain_world();
    let mut wd = chain_world();
    let f = FiniteFunctorData::identity(&mut wc).unwrap();
    let g = FiniteFunctorData::identity(&mut wd).unwrap();
    let mut eta = ComponentMap::new();
    let mut eps = ComponentMap::new();
    for name in ["a", "b", "c"] {
        let ec = wc.intern_raw(&raw(name)).unwrap();
        let ic = wc.id(ec).unwrap();
        eta.insert(ec, ic);
        let ed = wd.intern_raw(&raw(name)).unwrap();
        let id = wd.id(ed).unwrap();
        eps.insert(ed, id);
    }
    let report =
        gencat::check_adjunction_laws(&f, &g, &eta, &eps, &mut wc, &mut wd, 16).unwrap();
    assert!(report.ok(), "{:?}", report.violations);
}

#[test]
fn perturbed_counit_breaks_a_triangle() {
    let mut wc = World::new(Theory::Category);
    let a = wc.declare_object("a").unwrap();
    wc.declare_gen("e", a, a).unwrap();
    let mut wd = World::new(Theory::Category);
    let ad = wd.declare_object("a").unwrap();
    let ed = wd.declare_gen("e", ad, ad).unwrap();

    let f = FiniteFunctorData::identity(&mut wc).unwrap();
    let g = FiniteFunctorData::identity(&mut wd).unwrap();
    let mut eta = ComponentMap::new();
    let mut eps = ComponentMap::new();
    let ia = wc.id(a).unwrap();
    eta.insert(a, ia);
    eps.insert(ad, ed); // perturbed: ε at a is the loop, not the identity
    let report =
        gencat::check_adjunction_laws(&f, &g, &eta, &eps, &mut wc, &mut wd, 16).unwrap();
    assert!(!report.ok());
}
