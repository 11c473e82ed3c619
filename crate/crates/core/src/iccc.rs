//! Free ideal cartesian closed categories over a presentation: decidable
//! equality via the conditional rewrite system, good pairs and evaluations,
//! the name operation, and morphisms.
//!
//! Normal forms are maintained by the world's smart constructors; `equal`
//! is primarily normal-form identity, with a lambda-translation fallback
//! for the higher-order laws the first-order rules do not orient (the
//! interaction of `()*`/ε with η-like equations). The fallback is licensed
//! by the equivalence theorem and is skipped for expressions containing
//! constant-protected terminal arrows, where the lambda theory's
//! unconditional terminal collapse would be unsound.

use crate::error::Result;
use crate::expr::{ExprId, RawExpr, World};
use crate::gencat::FiniteFunctorData;

/// Elaborate and normalize a raw expression.
pub fn normalize(world: &mut World, raw: &RawExpr) -> Result<ExprId> {
    world.intern_raw(raw)
}

/// Decide equality in the free ideal cartesian closed category.
///
/// Boundaries are compared recursively (boundary expressions may themselves
/// be equal without sharing a normal form once the higher-order laws are in
/// play); the element comparison is normal-form identity with the lambda
/// fallback.
pub fn equal(world: &mut World, e1: ExprId, e2: ExprId) -> Result<bool> {
    equal_guarded(world, e1, e2, 0)
}

fn equal_guarded(world: &mut World, e1: ExprId, e2: ExprId, depth: u32) -> Result<bool> {
    if e1 == e2 {
        return Ok(true);
    }
    if depth > 64 {
        return Err(crate::error::Error::Internal("boundary comparison too deep"));
    }
    let (s1, s2) = (world.source(e1), world.source(e2));
    if s1 != e1 || s2 != e2 {
        if !equal_guarded(world, s1, s2, depth + 1)? {
            return Ok(false);
        }
    } else if s1 != s2 {
        return Ok(false);
    }
    let (t1, t2) = (world.target(e1), world.target(e2));
    if t1 != e1 || t2 != e2 {
        if !equal_guarded(world, t1, t2, depth + 1)? {
            return Ok(false);
        }
    } else if t1 != t2 {
        return Ok(false);
    }
    let higher = world.has_star_or_eval(e1) || world.has_star_or_eval(e2);
    let protected = world.has_protected_terminal(e1) || world.has_protected_terminal(e2);
    if higher && !protected {
        if let Some(&r) = world.equal_memo.get(&(e1, e2)) {
            return Ok(r);
        }
        let v1 = world.var_term(world.source(e1), 1)?;
        let t1 = world.act(e1, v1)?;
        let v2 = world.var_term(world.source(e2), 1)?;
        let t2 = world.act(e2, v2)?;
        let n1 = world.normalize_term(t1)?;
        let n2 = world.normalize_term(t2)?;
        let r = term_equal_mod(world, n1, n2, depth)?;
        world.equal_memo.insert((e1, e2), r);
        world.equal_memo.insert((e2, e1), r);
        return Ok(r);
    }
    Ok(false)
}

/// Structural comparison of normalized terms where the type slots compare
/// through categorical equality (boundary handles of equal types may
/// differ once the higher-order laws are involved).
fn term_equal_mod(
    world: &mut World,
    t1: crate::lam::TermId,
    t2: crate::lam::TermId,
    depth: u32,
) -> Result<bool> {
    use crate::lam::Term;
    if t1 == t2 {
        return Ok(true);
    }
    if depth > 64 {
        return Err(crate::error::Error::Internal("modular term comparison too deep"));
    }
    match (world.term_node(t1), world.term_node(t2)) {
        (Term::Var(a, d1), Term::Var(b, d2)) => {
            Ok(d1 == d2 && equal_guarded(world, a, b, depth + 1)?)
        }
        (Term::StarT, Term::StarT) => Ok(true),
        (Term::NameOf(a), Term::NameOf(b)) => equal_guarded(world, a, b, depth + 1),
        (Term::ConstT(a), Term::ConstT(b)) => Ok(a == b),
        (Term::Proj1T(a), Term::Proj1T(b)) | (Term::Proj2T(a), Term::Proj2T(b)) => {
            term_equal_mod(world, a, b, depth)
        }
        (Term::PairT(a, b), Term::PairT(c, d)) | (Term::App(a, b), Term::App(c, d)) => {
            Ok(term_equal_mod(world, a, c, depth)? && term_equal_mod(world, b, d, depth)?)
        }
        (Term::Lam(a, d1, b1), Term::Lam(b, d2, b2)) => Ok(d1 == d2
            && equal_guarded(world, a, b, depth + 1)?
            && term_equal_mod(world, b1, b2, depth)?),
        // η across the views: an expansion on one side only happens when
        // the other side's (equal) type is not an edge node, so expand it
        // on the fly.
        (Term::Lam(_, d1, b1), _) => eta_mod(world, d1, b1, t2, depth),
        (_, Term::Lam(_, d2, b2)) => eta_mod(world, d2, b2, t1, depth),
        (Term::PairT(a, b), _) => sp_mod(world, a, b, t2, depth),
        (_, Term::PairT(a, b)) => sp_mod(world, a, b, t1, depth),
        _ => Ok(false),
    }
}

fn eta_mod(
    world: &mut World,
    binder_depth: u32,
    body: crate::lam::TermId,
    other: crate::lam::TermId,
    depth: u32,
) -> Result<bool> {
    let ty = world.ty(other);
    let Some((a, _)) = world.view_ent_full(ty) else {
        return Ok(false);
    };
    let v = world.var_term(a, binder_depth)?;
    let app = world.app_term(other, v)?;
    let app = world.normalize_term(app)?;
    term_equal_mod(world, body, app, depth + 1)
}

fn sp_mod(
    world: &mut World,
    left: crate::lam::TermId,
    right: crate::lam::TermId,
    other: crate::lam::TermId,
    depth: u32,
) -> Result<bool> {
    let ty = world.ty(other);
    if world.view_wedge(ty)?.is_none() {
        return Ok(false);
    }
    let p1 = world.proj1_term(other)?;
    let p1 = world.normalize_term(p1)?;
    let p2 = world.proj2_term(other)?;
    let p2 = world.normalize_term(p2)?;
    Ok(term_equal_mod(world, left, p1, depth + 1)?
        && term_equal_mod(world, right, p2, depth + 1)?)
}

/// The canonical good pair for a pair of subjects.
pub fn good_pair(world: &mut World, a: ExprId, b: ExprId) -> Result<(ExprId, ExprId)> {
    Ok((world.proj1(a, b)?, world.proj2(a, b)?))
}

/// The canonical good evaluation for a pair of subjects.
pub fn good_eval(world: &mut World, a: ExprId, b: ExprId) -> Result<ExprId> {
    world.eval(a, b)
}

/// The name `⌜f⌝ : ⊤ → (f̄ ⊢ f̂)`.
pub fn name(world: &mut World, f: ExprId) -> Result<ExprId> {
    world.name_arrow(f)
}

/// A morphism of ideal cartesian closed categories, presented by generator
/// images; the homomorphic extension preserves `⊤`, `∧`, `⟨,⟩`, `⊢`, good
/// pairs, `()*`, and ε by construction.
pub type IcccMorphism = FiniteFunctorData;

/// Apply a morphism to an expression over its source world.
pub fn apply_morphism(
    m: &IcccMorphism,
    src: &World,
    dst: &mut World,
    e: ExprId,
) -> Result<ExprId> {
    m.apply(src, dst, e)
}
