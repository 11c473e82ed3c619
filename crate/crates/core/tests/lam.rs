//! The generalized typed lambda calculus: typing, free variables, the
//! renaming substitution, the equational theory, and the categorical
//! readback.

use gtt_core::expr::{ExprId, Theory, World};
use gtt_core::lam::{LambdaCalculus, Var};
use gtt_core::TermId;

/// Type atoms A, B (objects) and a type generator T : A → B; constant
/// terms k : A and j : A ⊢ B.
fn setup() -> (World, LambdaCalculus, ExprId, ExprId) {
    let mut w = World::new(Theory::Iccc);
    let a = w.declare_object("A").unwrap();
    let b = w.declare_object("B").unwrap();
    w.declare_gen("T", a, b).unwrap();
    w.declare_term_const("k", a).unwrap();
    let e = w.ent(a, b).unwrap();
    w.declare_term_const("j", e).unwrap();
    (w, LambdaCalculus::new(), a, b)
}

fn v(w: &mut World, ty: ExprId, d: u32) -> TermId {
    w.var_term(ty, d).unwrap()
}

#[test]
fn typing_conditions() {
    let (mut w, _calc, a, b) = setup();
    // ty(*) = ⊤.
    let s = w.star_term();
    let top = w.top();
    assert_eq!(w.ty(s), top);
    // ty(⌜A⌝) = Ā ⊢ Â for a type generator.
    let t = w.lookup_name("T").unwrap();
    let te = w.gen_expr(t).unwrap();
    let n = w.name_term(te).unwrap();
    let eab = w.ent(a, b).unwrap();
    assert_eq!(w.ty(n), eab);
    // ty(⟨s, t⟩) = ty(s) ∧ ty(t).
    let x = v(&mut w, a, 1);
    let y = v(&mut w, b, 1);
    let p = w.pair_term(x, y).unwrap();
    let w_ab = w.wedge(a, b).unwrap();
    assert_eq!(w.ty(p), w_ab);
    // ty(λ(x, s)) = ty(x) ⊢ ty(s).
    let l = w.lam_term(Var { ty: a, depth: 1 }, y).unwrap();
    let e_ab = w.ent(a, b).unwrap();
    assert_eq!(w.ty(l), e_ab);
    // ty(s ≀ t) = hat(ty(s)).
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let app = w.app_term(jt, x).unwrap();
    assert_eq!(w.ty(app), b);
    // Ill-typed applications are rejected.
    assert!(w.app_term(x, y).is_err());
}

#[test]
fn free_variables() {
    let (mut w, calc, a, _b) = setup();
    let t = w.lookup_name("T").unwrap();
    let te = w.gen_expr(t).unwrap();
    // FV(⌜A⌝) is empty.
    let n = w.name_term(te).unwrap();
    assert!(w.free_vars(&calc, n).is_empty());
    // Bound occurrence: FV(λ(x, x)) = ∅.
    let x = v(&mut w, a, 1);
    let l = w.lam_term(Var { ty: a, depth: 1 }, x).unwrap();
    assert!(w.free_vars(&calc, l).is_empty());
    // FV(j ≀ x) = {x}.
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let app = w.app_term(jt, x).unwrap();
    assert_eq!(w.free_vars(&calc, app), vec![Var { ty: a, depth: 1 }]);
    // Validating variables are excluded.
    let calc_x = calc.as_constant(Var { ty: a, depth: 1 });
    assert!(w.free_vars(&calc_x, app).is_empty());
    // as_constant is idempotent.
    let calc_xx = calc_x.as_constant(Var { ty: a, depth: 1 });
    assert_eq!(calc_x.validating, calc_xx.validating);
}

#[test]
fn substitution_basics_and_renaming() {
    let (mut w, _calc, a, _b) = setup();
    // subst(x, x, t) = t.
    let x = Var { ty: a, depth: 1 };
    let xv = v(&mut w, a, 1);
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    assert_eq!(w.subst(xv, x, kt).unwrap(), kt);
    // Capture avoidance with the order-preserving shift:
    // s = λ(y₁, ⟨x, y₁⟩), t = y₁ ⟹ s[x/t] = λ(y₂, ⟨y₁, y₂⟩).
    let y1 = Var { ty: a, depth: 1 };
    // Use distinct types to keep roles readable: x : A at depth 2.
    let x2 = Var { ty: a, depth: 2 };
    let x2v = v(&mut w, a, 2);
    let y1v = v(&mut w, a, 1);
    let body = w.pair_term(x2v, y1v).unwrap();
    let s = w.lam_term(y1, body).unwrap();
    let result = w.subst(s, x2, y1v).unwrap();
    // The scheme shifts the clash set inside t, giving λ(y₁, ⟨y₃, y₁⟩);
    // α-equivalent to the textbook λ(y₂, ⟨y₁, y₂⟩), checked against a
    // nameless-index oracle.
    let y2v = v(&mut w, a, 2);
    let eb = w.pair_term(y1v, y2v).unwrap();
    let textbook = w.lam_term(Var { ty: a, depth: 2 }, eb).unwrap();
    // The nameless skeletons agree up to the identity of the (renamed)
    // free variable: the scheme keeps the binder and shifts t's clash set,
    // the textbook form renames the binder; neither captures.
    let sk_result = debruijn(&w, result, &mut Vec::new());
    let sk_textbook = debruijn(&w, textbook, &mut Vec::new());
    let strip_free_depth = |s: &str| {
        // free|Ty|depth| -> free|Ty|
        let mut out = String::new();
        let mut rest = s;
        while let Some(i) = rest.find("free|") {
            let j = rest[i + 5..].find('|').unwrap() + i + 5;
            let k = rest[j + 1..].find('|').unwrap() + j + 1;
            out.push_str(&rest[..=j]);
            rest = &rest[k..];
        }
        out.push_str(rest);
        out
    };
    assert_eq!(strip_free_depth(&sk_result), strip_free_depth(&sk_textbook));
    // And no capture occurred: the renamed free variable is not bound.
    assert!(!w.fv_raw(result).is_empty());
}

/// Nameless-index rendering: binders push, variables print either a de
/// Bruijn level or their free identity.
fn debruijn(w: &World, t: TermId, env: &mut Vec<Var>) -> String {
    use gtt_core::lam::Term;
    match w.term_node(t) {
        Term::Var(ty, depth) => {
            let var = Var { ty, depth };
            match env.iter().rposition(|&u| u == var) {
                Some(i) => format!("#{}", env.len() - 1 - i),
                None => format!("free|{:?}|{}|", ty, depth),
            }
        }
        Term::StarT => "*".into(),
        Term::NameOf(a) => format!("name({a:?})"),
        Term::ConstT(k) => format!("const({k:?})"),
        Term::Proj1T(u) => format!("p1({})", debruijn(w, u, env)),
        Term::Proj2T(u) => format!("p2({})", debruijn(w, u, env)),
        Term::PairT(u, v) => {
            format!("<{},{}>", debruijn(w, u, env), debruijn(w, v, env))
        }
        Term::App(u, v) => format!("({} {})", debruijn(w, u, env), debruijn(w, v, env)),
        Term::Lam(ty, depth, b) => {
            env.push(Var { ty, depth });
            let s = format!("\\{:?}. {}", ty, debruijn(w, b, env));
            env.pop();
            s
        }
    }
}

#[test]
fn substitution_associativity() {
    // s[x/t][y/r] = s[x/t[y/r]] for y not free in s.
    let (mut w, _calc, a, b) = setup();
    let x = Var { ty: a, depth: 1 };
    let y = Var { ty: b, depth: 7 };
    let xv = v(&mut w, a, 1);
    let yv = v(&mut w, b, 7);
    // s = ⟨x, λ(z:B, x)⟩ with y not free.
    let z = Var { ty: b, depth: 1 };
    let lam_part = w.lam_term(z, xv).unwrap();
    let s = w.pair_term(xv, lam_part).unwrap();
    // t = ⟨k, y-dependent⟩ : needs type A for x; use a pair-free t of type A
    // that mentions y through an application j' : B ⊢ A.
    let eba = w.ent(b, a).unwrap();
    w.declare_term_const("jba", eba).unwrap();
    let jba = w.lookup_name("jba").unwrap();
    let jbat = w.const_term(jba).unwrap();
    let t = w.app_term(jbat, yv).unwrap();
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    // r : B.
    let ebb = w.ent(a, b).unwrap();
    w.declare_term_const("jab", ebb).unwrap();
    let jab = w.lookup_name("jab").unwrap();
    let jabt = w.const_term(jab).unwrap();
    let r = w.app_term(jabt, kt).unwrap();

    let s_xt = w.subst(s, x, t).unwrap();
    let lhs = w.subst(s_xt, y, r).unwrap();
    let t_yr = w.subst(t, y, r).unwrap();
    let rhs = w.subst(s, x, t_yr).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn equational_theory() {
    let (mut w, _calc, a, b) = setup();
    let x = Var { ty: a, depth: 1 };
    let xv = v(&mut w, a, 1);
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    // β: (λ(x, x)) ≀ k = k.
    let idl = w.lam_term(x, xv).unwrap();
    let app = w.app_term(idl, kt).unwrap();
    assert!(w.term_equal(app, kt).unwrap());
    // Projections: π⟨a, b⟩ = a.
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let jk = w.app_term(jt, kt).unwrap();
    let p = w.pair_term(kt, jk).unwrap();
    let p1 = w.proj1_term(p).unwrap();
    assert!(w.term_equal(p1, kt).unwrap());
    // Surjective pairing: ⟨π c, π′ c⟩ = c.
    let wab = w.wedge(a, b).unwrap();
    let c = v(&mut w, wab, 1);
    let c1 = w.proj1_term(c).unwrap();
    let c2 = w.proj2_term(c).unwrap();
    let cp = w.pair_term(c1, c2).unwrap();
    assert!(w.term_equal(cp, c).unwrap());
    // Terminal collapse: any s : ⊤ equals *.
    let top = w.top();
    let tv = v(&mut w, top, 3);
    let st = w.star_term();
    assert!(w.term_equal(tv, st).unwrap());
    // η: λ(x, s ≀ x) = s for x not free in s.
    let eta = {
        let sx = w.app_term(jt, xv).unwrap();
        w.lam_term(x, sx).unwrap()
    };
    assert!(w.term_equal(eta, jt).unwrap());
    // Distinct constants of one type stay distinct.
    w.declare_term_const("k2", a).unwrap();
    let k2 = w.lookup_name("k2").unwrap();
    let k2t = w.const_term(k2).unwrap();
    assert!(!w.term_equal(kt, k2t).unwrap());
}

#[test]
fn subject_reduction_and_idempotence() {
    let (mut w, _calc, a, b) = setup();
    let x = Var { ty: a, depth: 1 };
    let xv = v(&mut w, a, 1);
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let body = w.app_term(jt, xv).unwrap();
    let l = w.lam_term(x, body).unwrap();
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    let app = w.app_term(l, kt).unwrap();
    let n = w.normalize_term(app).unwrap();
    assert_eq!(w.ty(n), w.ty(app));
    let n2 = w.normalize_term(n).unwrap();
    assert_eq!(n, n2);
    let _ = b;
}

#[test]
fn name_application_unfolds_structured_types() {
    // (A·B) ⋆ s = A ⋆ (B ⋆ s): names of composites act functorially.
    let (mut w, _calc, a, b) = setup();
    let t = w.lookup_name("T").unwrap();
    let te = w.gen_expr(t).unwrap();
    w.declare_gen("S", b, a).unwrap();
    let sname = w.lookup_name("S").unwrap();
    let se = w.gen_expr(sname).unwrap();
    let st = w.comp(se, te).unwrap();
    let x = v(&mut w, a, 1);
    // ⌜S·T⌝ ≀ x
    let n_st = w.name_term(st).unwrap();
    let lhs = w.app_term(n_st, x).unwrap();
    // ⌜S⌝ ≀ (⌜T⌝ ≀ x)
    let n_t = w.name_term(te).unwrap();
    let n_s = w.name_term(se).unwrap();
    let tx = w.app_term(n_t, x).unwrap();
    let rhs = w.app_term(n_s, tx).unwrap();
    assert!(w.term_equal(lhs, rhs).unwrap());
}

#[test]
fn unname_readback() {
    let (mut w, calc, a, _b) = setup();
    let t = w.lookup_name("T").unwrap();
    let te = w.gen_expr(t).unwrap();
    // unname(⌜A⌝ ≀ x) = A.
    let x = v(&mut w, a, 1);
    let n = w.name_term(te).unwrap();
    let s = w.app_term(n, x).unwrap();
    assert_eq!(w.unname(&calc, s).unwrap(), te);
    // unname(x) = 1 on the variable's type.
    let one = w.id(a).unwrap();
    assert_eq!(w.unname(&calc, x).unwrap(), one);
    // unname(⟨x, x⟩) names the diagonal; applying it back gives ⟨x, x⟩.
    let p = w.pair_term(x, x).unwrap();
    let diag = w.unname(&calc, p).unwrap();
    let i = w.id(a).unwrap();
    let expect = w.pair(i, i).unwrap();
    assert_eq!(diag, expect);
    let nd = w.name_term(diag).unwrap();
    let back = w.app_term(nd, x).unwrap();
    assert!(w.term_equal(back, p).unwrap());
    // Closed bodies are rejected.
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    assert!(w.unname(&calc, kt).is_err());
}

#[test]
fn translations_preserve_structure() {
    use gtt_core::lam::Translation;
    let (mut w, _calc, a, b) = setup();
    // An endo-translation swapping nothing (identity) on a fresh world.
    let mut dst = World::new(Theory::Iccc);
    dst.declare_object("A").unwrap();
    dst.declare_object("B").unwrap();
    let da = dst.lookup_name("A").unwrap();
    let da = dst.gen_expr(da).unwrap();
    let db = dst.lookup_name("B").unwrap();
    let db = dst.gen_expr(db).unwrap();
    dst.declare_gen("T", da, db).unwrap();
    dst.declare_term_const("k", da).unwrap();
    let eab = dst.ent(da, db).unwrap();
    dst.declare_term_const("j", eab).unwrap();

    let phi = Translation { gen_map: Default::default(), const_map: Default::default() };
    // Φ(ty(s)) = ty(Φ(s)) and closed terms stay closed.
    let x = v(&mut w, a, 1);
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let s = w.app_term(jt, x).unwrap();
    let l = w.lam_term(Var { ty: a, depth: 1 }, s).unwrap();
    let img = phi.apply_term(&w, &mut dst, l).unwrap();
    let ty_img = phi.apply_type(&w, &mut dst, w.ty(l)).unwrap();
    assert_eq!(dst.ty(img), ty_img);
    assert!(dst.fv_raw(img).is_empty());
    // Φ(⌜A⌝) = ⌜Φ(A)⌝.
    let t = w.lookup_name("T").unwrap();
    let te = w.gen_expr(t).unwrap();
    let n = w.name_term(te).unwrap();
    let n_img = phi.apply_term(&w, &mut dst, n).unwrap();
    let te_img = phi.apply_type(&w, &mut dst, te).unwrap();
    let expect = dst.name_term(te_img).unwrap();
    assert_eq!(n_img, expect);
    let _ = b;
}

#[test]
fn readback_inverts_action() {
    // act(to_arrow(s)) recovers s for bulletins (the x-fragment round trip).
    let (mut w, calc, a, b) = setup();
    let x = Var { ty: a, depth: 1 };
    let xv = v(&mut w, a, 1);
    let j = w.lookup_name("j").unwrap();
    let jt = w.const_term(j).unwrap();
    let cases: Vec<TermId> = vec![
        xv,
        w.app_term(jt, xv).unwrap(),
        w.pair_term(xv, xv).unwrap(),
        {
            let jx = w.app_term(jt, xv).unwrap();
            w.pair_term(jx, xv).unwrap()
        },
        {
            // λ(y:B, x)
            let y = Var { ty: b, depth: 1 };
            w.lam_term(y, xv).unwrap()
        },
    ];
    for s in cases {
        let arrow = w.unname(&calc, s).unwrap();
        let n = w.name_term(arrow).unwrap();
        let back = w.app_term(n, xv).unwrap();
        assert!(
            w.term_equal(back, s).unwrap(),
            "readback failed for {}",
            gtt_core::correspond::render_term(&w, s)
        );
        let _ = x;
    }
}
