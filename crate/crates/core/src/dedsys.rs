//! Generalized deductive systems: the validity closure and bounded
//! goal-directed proof search for inhabitation of types `a ⊢ b`.
//!
//! Search is iterative deepening over the rule set (identity, terminal,
//! pairing and star introduction, projection and evaluation chaining, and
//! declared valid elements), with failed goals memoized per remaining
//! depth. A hit depth bound is reported as [`Error::DepthExceeded`], kept
//! distinct from a definite negative.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprId, World};

/// How a witness was derived; replaying rebuilds the witness expression.
#[derive(Debug, Clone)]
pub enum Derivation {
    /// `1_a : a → a`.
    Identity(ExprId),
    /// `a ⊢ ⊤ : a → ⊤`.
    Terminal(ExprId),
    /// A declared valid element (or validating indeterminate).
    Seed(ExprId),
    /// `⟨w₁, w₂⟩` for a wedge target.
    PairIntro(Box<Derivation>, Box<Derivation>),
    /// `w*` for an exponential target.
    StarIntro(Box<Derivation>),
    /// `w · π` or `w · π′` on a wedge source (`first` selects the leg).
    ProjChain { first: bool, left: ExprId, right: ExprId, rest: Box<Derivation> },
    /// `w · ε_{u,v}` on an evaluation-shaped source.
    EvalChain { u: ExprId, v: ExprId, rest: Box<Derivation> },
    /// `w₂ · f · w₁` through a declared valid element `f`.
    SeedChain { seed: ExprId, before: Box<Derivation>, after: Box<Derivation> },
    /// `ε_{u,b} · ⟨w₁, w₂⟩`: a cut through the evaluation at `u`.
    EvalCut { u: ExprId, target: ExprId, fun: Box<Derivation>, arg: Box<Derivation> },
}

impl Derivation {
    /// Rebuild the witness expression bottom-up.
    pub fn replay(&self, world: &mut World) -> Result<ExprId> {
        match self {
            Derivation::Identity(a) => world.id(*a),
            Derivation::Terminal(a) => {
                let top = world.top();
                world.ent(*a, top)
            }
            Derivation::Seed(e) => Ok(*e),
            Derivation::PairIntro(l, r) => {
                let l = l.replay(world)?;
                let r = r.replay(world)?;
                world.pair(l, r)
            }
            Derivation::StarIntro(w) => {
                let w = w.replay(world)?;
                world.star(w)
            }
            Derivation::ProjChain { first, left, right, rest } => {
                let w = rest.replay(world)?;
                let p = if *first {
                    world.proj1(*left, *right)?
                } else {
                    world.proj2(*left, *right)?
                };
                world.comp(w, p)
            }
            Derivation::EvalChain { u, v, rest } => {
                let w = rest.replay(world)?;
                let e = world.eval(*u, *v)?;
                world.comp(w, e)
            }
            Derivation::SeedChain { seed, before, after } => {
                let b = before.replay(world)?;
                let a = after.replay(world)?;
                let fa = world.comp(*seed, b)?;
                world.comp(a, fa)
            }
            Derivation::EvalCut { u, target, fun, arg } => {
                let f = fun.replay(world)?;
                let x = arg.replay(world)?;
                let p = world.pair(f, x)?;
                let e = world.eval(*u, *target)?;
                world.comp(e, p)
            }
        }
    }
}

/// A valid path together with its derivation.
#[derive(Debug, Clone)]
pub struct Witness {
    pub expr: ExprId,
    pub source: ExprId,
    pub target: ExprId,
    pub derivation: Derivation,
}

impl Witness {
    /// Wrap an expression as a seed-derived witness, verifying validity.
    pub fn checked(world: &mut World, expr: ExprId, depth: u32) -> Result<Witness> {
        if !is_valid(world, expr, depth)? {
            return Err(Error::MalformedExpr(alloc::format!(
                "expression is not valid: {}",
                world.render(expr)
            )));
        }
        Ok(Witness {
            expr,
            source: world.source(expr),
            target: world.target(expr),
            derivation: Derivation::Seed(expr),
        })
    }
}

/// The four canonical valid elements for a pair of subjects, with the
/// boundaries `ter_a : a → ⊤`, `π : a∧b → a`, `π′ : a∧b → b`,
/// `ε : (a ⊢ b) ∧ a → b`.
pub struct NamedConstants {
    pub ter: ExprId,
    pub pi: ExprId,
    pub pi2: ExprId,
    pub eps: ExprId,
}

pub fn named_constants(world: &mut World, a: ExprId, b: ExprId) -> Result<NamedConstants> {
    let top = world.top();
    Ok(NamedConstants {
        ter: world.ent(a, top)?,
        pi: world.proj1(a, b)?,
        pi2: world.proj2(a, b)?,
        eps: world.eval(a, b)?,
    })
}

/// Outcome of a bounded search.
enum SearchOutcome {
    Found(Derivation),
    Exhausted,
    Cutoff,
}

struct Searcher<'w> {
    world: &'w mut World,
    /// Failed goals: (source, target) → largest remaining depth that failed
    /// exhaustively (`Ok`) or by cutoff (`Cut`).
    failed_exhausted: BTreeMap<(ExprId, ExprId), u32>,
    failed_cutoff: BTreeSet<(ExprId, ExprId, u32)>,
    /// Candidate subjects for evaluation cuts.
    universe: Vec<ExprId>,
    /// The subformula set: evaluation cuts only go through function types
    /// occurring here (the fragment has the subformula property, which
    /// keeps the search space finite and negatives definite).
    subformulas: BTreeSet<ExprId>,
    seeds: Vec<ExprId>,
}

impl<'w> Searcher<'w> {
    fn new(world: &'w mut World, a: ExprId, b: ExprId) -> Self {
        let mut uni = BTreeSet::new();
        collect_subjects(world, a, &mut uni);
        collect_subjects(world, b, &mut uni);
        let seeds: Vec<ExprId> = world.valid_seeds.iter().copied().collect();
        for &s in &seeds {
            collect_subjects(world, world.source(s), &mut uni);
            collect_subjects(world, world.target(s), &mut uni);
        }
        // Indeterminates are valid in the polynomial system.
        let indets: Vec<ExprId> = world
            .indet_names()
            .into_iter()
            .filter_map(|n| world.indet_expr(n).ok())
            .collect();
        let mut all_seeds = seeds;
        all_seeds.extend(indets);
        all_seeds.sort();
        all_seeds.dedup();
        Searcher {
            world,
            failed_exhausted: BTreeMap::new(),
            failed_cutoff: BTreeSet::new(),
            universe: uni.iter().copied().collect(),
            subformulas: uni,
            seeds: all_seeds,
        }
    }

    fn prove(&mut self, x: ExprId, b: ExprId, rem: u32) -> Result<SearchOutcome> {
        if x == b {
            return Ok(SearchOutcome::Found(Derivation::Identity(x)));
        }
        if self.world.node(b) == Expr::Top {
            return Ok(SearchOutcome::Found(Derivation::Terminal(x)));
        }
        if rem == 0 {
            return Ok(SearchOutcome::Cutoff);
        }
        if let Some(&r) = self.failed_exhausted.get(&(x, b)) {
            if rem <= r {
                return Ok(SearchOutcome::Exhausted);
            }
        }
        if self.failed_cutoff.contains(&(x, b, rem)) {
            return Ok(SearchOutcome::Cutoff);
        }
        let mut cut = false;

        // Declared valid elements with matching boundaries, or chained.
        for s in self.seeds.clone() {
            let ss = self.world.source(s);
            let st = self.world.target(s);
            if ss == x && st == b {
                return Ok(SearchOutcome::Found(Derivation::Seed(s)));
            }
        }

        // Pair introduction on a wedge target.
        if let Expr::Wedge(u, v) = self.world.node(b) {
            match self.prove(x, u, rem - 1)? {
                SearchOutcome::Found(l) => match self.prove(x, v, rem - 1)? {
                    SearchOutcome::Found(r) => {
                        return Ok(SearchOutcome::Found(Derivation::PairIntro(
                            Box::new(l),
                            Box::new(r),
                        )))
                    }
                    SearchOutcome::Cutoff => cut = true,
                    SearchOutcome::Exhausted => {}
                },
                SearchOutcome::Cutoff => cut = true,
                SearchOutcome::Exhausted => {}
            }
        }

        // Star introduction on an exponential target.
        if let Expr::Ent(u, v) = self.world.node(b) {
            let src = self.world.wedge(x, u)?;
            if self.world.wedge_components(src)?.is_some() {
                match self.prove(src, v, rem - 1)? {
                    SearchOutcome::Found(w) => {
                        return Ok(SearchOutcome::Found(Derivation::StarIntro(Box::new(w))))
                    }
                    SearchOutcome::Cutoff => cut = true,
                    SearchOutcome::Exhausted => {}
                }
            }
        }

        // Projection chaining on a (possibly pair-formed) wedge source.
        if let Some((u, v)) = self.world.wedge_components(x)? {
            match self.prove(u, b, rem - 1)? {
                SearchOutcome::Found(w) => {
                    return Ok(SearchOutcome::Found(Derivation::ProjChain {
                        first: true,
                        left: u,
                        right: v,
                        rest: Box::new(w),
                    }))
                }
                SearchOutcome::Cutoff => cut = true,
                SearchOutcome::Exhausted => {}
            }
            match self.prove(v, b, rem - 1)? {
                SearchOutcome::Found(w) => {
                    return Ok(SearchOutcome::Found(Derivation::ProjChain {
                        first: false,
                        left: u,
                        right: v,
                        rest: Box::new(w),
                    }))
                }
                SearchOutcome::Cutoff => cut = true,
                SearchOutcome::Exhausted => {}
            }
            // Direct evaluation on an `(u ⊢ v) ∧ u`-shaped source.
            if let Expr::Ent(eu, ev) = self.world.node(u) {
                if eu == v {
                    match self.prove(ev, b, rem - 1)? {
                        SearchOutcome::Found(w) => {
                            return Ok(SearchOutcome::Found(Derivation::EvalChain {
                                u: eu,
                                v: ev,
                                rest: Box::new(w),
                            }))
                        }
                        SearchOutcome::Cutoff => cut = true,
                        SearchOutcome::Exhausted => {}
                    }
                }
            }
        }

        // Evaluation cut: x → (u ⊢ b) and x → u give x → b, restricted to
        // function types in the subformula set.
        for u in self.universe.clone() {
            if u == b && x == u {
                continue;
            }
            let fun_ty = self.world.ent(u, b)?;
            if fun_ty == b || !self.subformulas.contains(&fun_ty) {
                continue;
            }
            match self.prove(x, fun_ty, rem - 1)? {
                SearchOutcome::Found(f) => match self.prove(x, u, rem - 1)? {
                    SearchOutcome::Found(arg) => {
                        return Ok(SearchOutcome::Found(Derivation::EvalCut {
                            u,
                            target: b,
                            fun: Box::new(f),
                            arg: Box::new(arg),
                        }))
                    }
                    SearchOutcome::Cutoff => cut = true,
                    SearchOutcome::Exhausted => {}
                },
                SearchOutcome::Cutoff => cut = true,
                SearchOutcome::Exhausted => {}
            }
        }

        // Chaining through a declared valid element.
        for s in self.seeds.clone() {
            let ss = self.world.source(s);
            let st = self.world.target(s);
            if st == b {
                // Only the incoming leg remains.
                match self.prove(x, ss, rem - 1)? {
                    SearchOutcome::Found(w) => {
                        return Ok(SearchOutcome::Found(Derivation::SeedChain {
                            seed: s,
                            before: Box::new(w),
                            after: Box::new(Derivation::Identity(b)),
                        }))
                    }
                    SearchOutcome::Cutoff => cut = true,
                    SearchOutcome::Exhausted => {}
                }
            } else {
                match self.prove(x, ss, rem - 1)? {
                    SearchOutcome::Found(w1) => match self.prove(st, b, rem - 1)? {
                        SearchOutcome::Found(w2) => {
                            return Ok(SearchOutcome::Found(Derivation::SeedChain {
                                seed: s,
                                before: Box::new(w1),
                                after: Box::new(w2),
                            }))
                        }
                        SearchOutcome::Cutoff => cut = true,
                        SearchOutcome::Exhausted => {}
                    },
                    SearchOutcome::Cutoff => cut = true,
                    SearchOutcome::Exhausted => {}
                }
            }
        }

        if cut {
            self.failed_cutoff.insert((x, b, rem));
            Ok(SearchOutcome::Cutoff)
        } else {
            let e = self.failed_exhausted.entry((x, b)).or_insert(0);
            *e = (*e).max(rem);
            Ok(SearchOutcome::Exhausted)
        }
    }
}

fn collect_subjects(world: &World, e: ExprId, out: &mut BTreeSet<ExprId>) {
    out.insert(e);
    match world.node(e) {
        Expr::Wedge(a, b) | Expr::Ent(a, b) => {
            collect_subjects(world, a, out);
            collect_subjects(world, b, out);
        }
        _ => {}
    }
}

/// Search for a valid path `a → b` within the derivation depth bound.
/// `Ok(None)` is a definite negative; a hit bound raises `DepthExceeded`.
pub fn inhabit(world: &mut World, a: ExprId, b: ExprId, depth: u32) -> Result<Option<Witness>> {
    let mut s = Searcher::new(world, a, b);
    let mut cutoff_at_max = false;
    for d in 0..=depth {
        s.failed_cutoff.clear();
        match s.prove(a, b, d)? {
            SearchOutcome::Found(derivation) => {
                let expr = derivation.replay(s.world)?;
                return Ok(Some(Witness { expr, source: a, target: b, derivation }));
            }
            SearchOutcome::Exhausted => return Ok(None),
            SearchOutcome::Cutoff => cutoff_at_max = true,
        }
    }
    if cutoff_at_max {
        Err(Error::DepthExceeded)
    } else {
        Ok(None)
    }
}

/// Derivability of `e` in the validity closure, evaluated on the normal
/// form: seeds, identities, canonical constants, closure under the
/// operations, and inhabitation for type edges.
pub fn is_valid(world: &mut World, e: ExprId, depth: u32) -> Result<bool> {
    if world.valid_seeds.contains(&e) {
        return Ok(true);
    }
    match world.node(e) {
        Expr::Top => Ok(true),
        Expr::Id(_) => Ok(true),
        Expr::Gen(_) => Ok(world.is_object(e)),
        Expr::Indet(_) => Ok(true),
        Expr::Proj1(..) | Expr::Proj2(..) | Expr::Eval(..) => Ok(true),
        Expr::Comp(f, g) => Ok(is_valid(world, f, depth)? && is_valid(world, g, depth)?),
        Expr::Wedge(f, g) | Expr::Pair(f, g) => {
            Ok(is_valid(world, f, depth)? && is_valid(world, g, depth)?)
        }
        Expr::Star(f) => is_valid(world, f, depth),
        Expr::Ent(a, b) => {
            // Rule (5) shapes are valid outright.
            if world.node(b) == Expr::Top {
                return Ok(true);
            }
            if let Expr::Wedge(u, v) = world.node(a) {
                if u == b || v == b {
                    return Ok(true);
                }
                if let Expr::Ent(eu, ev) = world.node(u) {
                    if eu == v && ev == b {
                        return Ok(true);
                    }
                }
            }
            // Otherwise validity needs a witness.
            Ok(inhabit(world, a, b, depth)?.is_some())
        }
    }
}
