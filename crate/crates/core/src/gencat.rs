//! Freely presented generalized categories: boundary computation, partial
//! composition, the declared order, and law checkers for functors, monads,
//! and adjunctions given as finite data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{ExprId, NameId, World};
use crate::rng::SplitMix;

/// Normalized source of a well-formed expression.
pub fn source(world: &World, e: ExprId) -> ExprId {
    world.source(e)
}

/// Normalized target of a well-formed expression.
pub fn target(world: &World, e: ExprId) -> ExprId {
    world.target(e)
}

/// Compose `a · b` (`a` after `b`), normalizing identities and association.
pub fn compose(world: &mut World, a: ExprId, b: ExprId) -> Result<ExprId> {
    world.comp(a, b)
}

/// Decide `a ⪯ b` in the reflexive-transitive-congruence closure of the
/// declared order pairs. With no declared pairs this is equality of normal
/// forms.
pub fn leq(world: &World, a: ExprId, b: ExprId) -> bool {
    world.leq(a, b)
}

/// A functor presented as finite data: images for every generator.
#[derive(Debug, Clone, Default)]
pub struct FiniteFunctorData {
    pub map: BTreeMap<NameId, ExprId>,
}

impl FiniteFunctorData {
    pub fn identity(world: &mut World) -> Result<Self> {
        let mut map = BTreeMap::new();
        for n in world.generator_names() {
            let e = world.gen_expr(n)?;
            map.insert(n, e);
        }
        Ok(FiniteFunctorData { map })
    }

    /// Homomorphic extension to expressions of the source world, rebuilt
    /// (and hence re-normalized) in the destination world.
    pub fn apply(&self, src: &World, dst: &mut World, e: ExprId) -> Result<ExprId> {
        use crate::expr::Expr;
        match src.node(e) {
            Expr::Gen(n) => self
                .map
                .get(&n)
                .copied()
                .ok_or_else(|| Error::UnknownName(src.name_str(n).into())),
            Expr::Indet(n) => Err(Error::UnknownIndeterminate(src.name_str(n).into())),
            Expr::Top => Ok(dst.top()),
            Expr::Id(a) => {
                let a = self.apply(src, dst, a)?;
                dst.id(a)
            }
            Expr::Comp(f, g) => {
                let f = self.apply(src, dst, f)?;
                let g = self.apply(src, dst, g)?;
                dst.comp(f, g)
            }
            Expr::Ent(a, b) => {
                let a = self.apply(src, dst, a)?;
                let b = self.apply(src, dst, b)?;
                dst.ent(a, b)
            }
            Expr::Wedge(f, g) => {
                let f = self.apply(src, dst, f)?;
                let g = self.apply(src, dst, g)?;
                dst.wedge(f, g)
            }
            Expr::Pair(f, g) => {
                let f = self.apply(src, dst, f)?;
                let g = self.apply(src, dst, g)?;
                dst.pair(f, g)
            }
            Expr::Star(f) => {
                let f = self.apply(src, dst, f)?;
                dst.star(f)
            }
            Expr::Proj1(a, b) => {
                let a = self.apply(src, dst, a)?;
                let b = self.apply(src, dst, b)?;
                dst.proj1(a, b)
            }
            Expr::Proj2(a, b) => {
                let a = self.apply(src, dst, a)?;
                let b = self.apply(src, dst, b)?;
                dst.proj2(a, b)
            }
            Expr::Eval(a, b) => {
                let a = self.apply(src, dst, a)?;
                let b = self.apply(src, dst, b)?;
                dst.eval(a, b)
            }
        }
    }
}

/// One failed law instance, with a printed witness.
#[derive(Debug, Clone)]
pub struct Violation {
    pub law: &'static str,
    pub witness: String,
}

#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the functor equations `F(gf) = F(g)F(f)`, `F(f̄) = bar F(f)`,
/// `F(f̂) = hat F(f)` on all generators and `samples` random composable
/// pairs drawn from generator chains.
pub fn check_functor(
    data: &FiniteFunctorData,
    src: &mut World,
    dst: &mut World,
    samples: usize,
    seed: u64,
) -> Result<LawReport> {
    let mut report = LawReport::default();
    let gens = src.generator_names();
    let mut gen_exprs = Vec::new();
    for n in &gens {
        if !data.map.contains_key(n) {
            return Err(Error::UnknownName(src.name_str(*n).into()));
        }
        gen_exprs.push(src.gen_expr(*n)?);
    }
    for &g in &gen_exprs {
        report.checked += 1;
        let fg = data.apply(src, dst, g)?;
        let s = src.source(g);
        let t = src.target(g);
        let fs = data.apply(src, dst, s)?;
        let ft = data.apply(src, dst, t)?;
        if dst.source(fg) != fs {
            report.violations.push(Violation {
                law: "F(bar f) = bar F(f)",
                witness: format!(
                    "{}: F(source) = {}, source(F) = {}",
                    src.render(g),
                    dst.render(fs),
                    dst.render(dst.source(fg))
                ),
            });
        }
        if dst.target(fg) != ft {
            report.violations.push(Violation {
                law: "F(hat f) = hat F(f)",
                witness: format!(
                    "{}: F(target) = {}, target(F) = {}",
                    src.render(g),
                    dst.render(ft),
                    dst.render(dst.target(fg))
                ),
            });
        }
    }
    // Random composable pairs out of generator chains.
    let mut rng = SplitMix::new(seed);
    let mut tried = 0usize;
    let mut found = 0usize;
    while found < samples && tried < samples * 20 + 50 {
        tried += 1;
        if gen_exprs.is_empty() {
            break;
        }
        let f = gen_exprs[rng.below(gen_exprs.len())];
        let g = gen_exprs[rng.below(gen_exprs.len())];
        if !src.leq(src.source(f), src.target(g)) {
            continue;
        }
        found += 1;
        report.checked += 1;
        let fg = src.comp(f, g)?;
        let lhs = data.apply(src, dst, fg)?;
        let ff = data.apply(src, dst, f)?;
        let fgi = data.apply(src, dst, g)?;
        if !dst.leq(dst.source(ff), dst.target(fgi)) {
            report.violations.push(Violation {
                law: "F preserves composability",
                witness: format!("{} . {}", src.render(f), src.render(g)),
            });
            continue;
        }
        let rhs = dst.comp(ff, fgi)?;
        if lhs != rhs {
            report.violations.push(Violation {
                law: "F(gf) = F(g)F(f)",
                witness: format!(
                    "{} . {}: {} vs {}",
                    src.render(f),
                    src.render(g),
                    dst.render(lhs),
                    dst.render(rhs)
                ),
            });
        }
    }
    Ok(report)
}

/// Pointwise natural-transformation data on a finite sample domain.
pub type ComponentMap = BTreeMap<ExprId, ExprId>;

fn component(map: &ComponentMap, world: &World, at: ExprId) -> Result<ExprId> {
    map.get(&at)
        .copied()
        .ok_or_else(|| Error::MalformedExpr(format!("no component at {}", world.render(at))))
}

/// Check the monad laws and the naturality squares of `eta`/`mu` on the
/// elements of their (finite) domains.
pub fn check_monad_laws(
    t_data: &FiniteFunctorData,
    eta: &ComponentMap,
    mu: &ComponentMap,
    world: &mut World,
    samples: usize,
) -> Result<LawReport> {
    let mut report = LawReport::default();
    let t = |w: &mut World, e| t_data.apply_endo(w, e);
    // Naturality of eta: eta_{hat f} · f = T(f) · eta_{bar f}
    let keys: Vec<ExprId> = eta.keys().copied().take(samples.max(1)).collect();
    for f in keys {
        report.checked += 1;
        let s = world.source(f);
        let tgt = world.target(f);
        let (es, et) = match (eta.get(&s), eta.get(&tgt)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => continue,
        };
        let tf = t(world, f)?;
        let lhs = world.comp(et, f)?;
        let rhs = world.comp(tf, es)?;
        if lhs != rhs {
            report.violations.push(Violation {
                law: "eta naturality",
                witness: world.render(f),
            });
        }
    }
    // Monad laws at each element `a` with all needed components present.
    let keys: Vec<ExprId> = mu.keys().copied().take(samples.max(1)).collect();
    for a in keys {
        let ta = t(world, a)?;
        let tta = t(world, ta)?;
        let mu_a = component(mu, world, a)?;
        // Associativity needs mu at T(a).
        if let Some(&mu_ta) = mu.get(&ta) {
            report.checked += 1;
            let t_mu_a = t(world, mu_a)?;
            let lhs = world.comp(mu_a, t_mu_a)?;
            let rhs = world.comp(mu_a, mu_ta)?;
            let _ = tta;
            if lhs != rhs {
                report.violations.push(Violation {
                    law: "mu . T(mu) = mu . mu_T",
                    witness: world.render(a),
                });
            }
        }
        if let Some(&eta_a) = eta.get(&a) {
            report.checked += 1;
            let t_eta_a = t(world, eta_a)?;
            let one = world.id(ta)?;
            let lhs = world.comp(mu_a, t_eta_a)?;
            if lhs != one {
                report.violations.push(Violation {
                    law: "mu . T(eta) = 1",
                    witness: world.render(a),
                });
            }
            if let Some(&eta_ta) = eta.get(&ta) {
                let rhs = world.comp(mu_a, eta_ta)?;
                if rhs != one {
                    report.violations.push(Violation {
                        law: "mu . eta_T = 1",
                        witness: world.render(a),
                    });
                }
            }
        }
    }
    Ok(report)
}

impl FiniteFunctorData {
    /// Endofunctor application within one world.
    pub fn apply_endo(&self, world: &mut World, e: ExprId) -> Result<ExprId> {
        // An endofunctor application within one world; split borrows via a
        // structural walk identical to `apply`.
        use crate::expr::Expr;
        match world.node(e) {
            Expr::Gen(n) => self
                .map
                .get(&n)
                .copied()
                .ok_or_else(|| Error::UnknownName(world.name_str(n).into())),
            Expr::Top => Ok(world.top()),
            Expr::Indet(n) => Err(Error::UnknownIndeterminate(world.name_str(n).into())),
            Expr::Id(a) => {
                let a = self.apply_endo(world, a)?;
                world.id(a)
            }
            Expr::Comp(f, g) => {
                let f = self.apply_endo(world, f)?;
                let g = self.apply_endo(world, g)?;
                world.comp(f, g)
            }
            Expr::Ent(a, b) => {
                let a = self.apply_endo(world, a)?;
                let b = self.apply_endo(world, b)?;
                world.ent(a, b)
            }
            Expr::Wedge(f, g) => {
                let f = self.apply_endo(world, f)?;
                let g = self.apply_endo(world, g)?;
                world.wedge(f, g)
            }
            Expr::Pair(f, g) => {
                let f = self.apply_endo(world, f)?;
                let g = self.apply_endo(world, g)?;
                world.pair(f, g)
            }
            Expr::Star(f) => {
                let f = self.apply_endo(world, f)?;
                world.star(f)
            }
            Expr::Proj1(a, b) => {
                let a = self.apply_endo(world, a)?;
                let b = self.apply_endo(world, b)?;
                world.proj1(a, b)
            }
            Expr::Proj2(a, b) => {
                let a = self.apply_endo(world, a)?;
                let b = self.apply_endo(world, b)?;
                world.proj2(a, b)
            }
            Expr::Eval(a, b) => {
                let a = self.apply_endo(world, a)?;
                let b = self.apply_endo(world, b)?;
                world.eval(a, b)
            }
        }
    }
}

/// Check the two triangle identities of an adjunction on the sample domain:
/// `(G ε) ∘v (η G) = 1_G` and `(ε F) ∘v (F η) = 1_F`.
#[allow(clippy::too_many_arguments)]
pub fn check_adjunction_laws(
    f_data: &FiniteFunctorData,
    g_data: &FiniteFunctorData,
    eta: &ComponentMap,
    epsilon: &ComponentMap,
    world_c: &mut World,
    world_d: &mut World,
    samples: usize,
) -> Result<LawReport> {
    let mut report = LawReport::default();
    // First triangle, at elements d of the D-sample: G(eps_d) · eta_{G d} = 1_{G d}.
    let keys: Vec<ExprId> = epsilon.keys().copied().take(samples.max(1)).collect();
    for d in keys {
        let gd = g_data.apply(world_d, world_c, d)?;
        if let (Some(&eps_d), Some(&eta_gd)) = (epsilon.get(&d), eta.get(&gd)) {
            report.checked += 1;
            let g_eps = g_data.apply(world_d, world_c, eps_d)?;
            let lhs = world_c.comp(g_eps, eta_gd)?;
            let one = world_c.id(gd)?;
            if lhs != one {
                report.violations.push(Violation {
                    law: "(G eps) . (eta G) = 1_G",
                    witness: world_d.render(d),
                });
            }
        }
    }
    // Second triangle, at elements c of the C-sample: eps_{F c} · F(eta_c) = 1_{F c}.
    let keys: Vec<ExprId> = eta.keys().copied().take(samples.max(1)).collect();
    for c in keys {
        let fc = f_data.apply(world_c, world_d, c)?;
        if let (Some(&eta_c), Some(&eps_fc)) = (eta.get(&c), epsilon.get(&fc)) {
            report.checked += 1;
            let f_eta = f_data.apply(world_c, world_d, eta_c)?;
            let lhs = world_d.comp(eps_fc, f_eta)?;
            let one = world_d.id(fc)?;
            if lhs != one {
                report.violations.push(Violation {
                    law: "(eps F) . (F eta) = 1_F",
                    witness: world_c.render(c),
                });
            }
        }
    }
    Ok(report)
}
