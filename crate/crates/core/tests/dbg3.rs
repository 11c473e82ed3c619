use gtt_core::expr::{Theory, World};
use gtt_core::lam::Var;
use gtt_core::correspond::render_term;

#[test]
fn assoc_trace() {
    let mut w = World::new(Theory::Iccc);
    let a = w.declare_object("A").unwrap();
    let b = w.declare_object("B").unwrap();
    w.declare_term_const("k", a).unwrap();
    let eba = w.ent(b, a).unwrap();
    w.declare_term_const("jba", eba).unwrap();
    let eab = w.ent(a, b).unwrap();
    w.declare_term_const("jab", eab).unwrap();

    let x = Var { ty: a, depth: 1 };
    let y = Var { ty: b, depth: 7 };
    let xv = w.var_term(a, 1).unwrap();
    let yv = w.var_term(b, 7).unwrap();
    let z = Var { ty: b, depth: 1 };
    let lam_part = w.lam_term(z, xv).unwrap();
    let s = w.pair_term(xv, lam_part).unwrap();
    let jba = w.lookup_name("jba").unwrap();
    let jbat = w.const_term(jba).unwrap();
    let t = w.app_term(jbat, yv).unwrap();
    let k = w.lookup_name("k").unwrap();
    let kt = w.const_term(k).unwrap();
    let jab = w.lookup_name("jab").unwrap();
    let jabt = w.const_term(jab).unwrap();
    let r = w.app_term(jabt, kt).unwrap();

    let s_xt = w.subst(s, x, t).unwrap();
    std::eprintln!("s      = {}", render_term(&w, s));
    std::eprintln!("s[x/t] = {}", render_term(&w, s_xt));
    let lhs = w.subst(s_xt, y, r).unwrap();
    std::eprintln!("lhs    = {}", render_term(&w, lhs));
    let t_yr = w.subst(t, y, r).unwrap();
    std::eprintln!("t[y/r] = {}", render_term(&w, t_yr));
    let rhs = w.subst(s, x, t_yr).unwrap();
    std::eprintln!("rhs    = {}", render_term(&w, rhs));
}
