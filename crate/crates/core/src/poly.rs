//! Polynomial extensions and abstraction elimination: the κ_x witness
//! construction of the Deduction Theorem, functional completeness ε_x, its
//! name λ_x, and substitution functors.
//!
//! The constructions are generic over [`CccOps`] so the same case table
//! serves both the free ideal cartesian closed category (arrows are
//! interned expressions) and the symbol category built from a lambda
//! calculus.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprId, NameId, World};

/// The ideal cartesian closed operations κ/ε/λ need.
pub trait CccOps {
    type Arr: Clone + PartialEq + core::fmt::Debug;

    fn src(&mut self, a: &Self::Arr) -> Result<Self::Arr>;
    fn tgt(&mut self, a: &Self::Arr) -> Result<Self::Arr>;
    fn comp(&mut self, f: &Self::Arr, g: &Self::Arr) -> Result<Self::Arr>;
    fn id(&mut self, a: &Self::Arr) -> Result<Self::Arr>;
    fn top(&mut self) -> Result<Self::Arr>;
    fn wedge(&mut self, a: &Self::Arr, b: &Self::Arr) -> Result<Self::Arr>;
    fn pair(&mut self, f: &Self::Arr, g: &Self::Arr) -> Result<Self::Arr>;
    fn star(&mut self, f: &Self::Arr) -> Result<Self::Arr>;
    fn ent(&mut self, a: &Self::Arr, b: &Self::Arr) -> Result<Self::Arr>;
    fn proj1(&mut self, a: &Self::Arr, b: &Self::Arr) -> Result<Self::Arr>;
    fn proj2(&mut self, a: &Self::Arr, b: &Self::Arr) -> Result<Self::Arr>;
    fn eval(&mut self, a: &Self::Arr, b: &Self::Arr) -> Result<Self::Arr>;
    /// Decompose a wedge subject into its factors, if it is one.
    fn wedge_parts(&mut self, a: &Self::Arr) -> Result<Option<(Self::Arr, Self::Arr)>>;
    fn eq(&mut self, f: &Self::Arr, g: &Self::Arr) -> Result<bool>;
    /// The subject playing the role of a type expression.
    fn of_type(&mut self, ty: ExprId) -> Result<Self::Arr>;
    /// The global element `⌜A⌝` of a type expression.
    fn name_of_type(&mut self, ty: ExprId) -> Result<Self::Arr>;
    /// A declared constant term as a global element.
    fn const_atom(&mut self, k: NameId) -> Result<Self::Arr>;
    /// Read access to the shared term arena.
    fn term_node(&self, t: crate::lam::TermId) -> crate::lam::Term;
    fn term_ty(&self, t: crate::lam::TermId) -> ExprId;
    fn type_node(&self, ty: ExprId) -> Expr;
    /// Type views (identities view as exponentials/products).
    fn view_ent_ty(&self, ty: ExprId) -> Option<(ExprId, ExprId)>;
    fn view_wedge_ty(&mut self, ty: ExprId) -> Result<Option<(ExprId, ExprId)>>;
}

/// Convert a lambda term in a variable context into a polynomial over a
/// [`CccOps`] world: variables become indeterminates, structure is mapped
/// through the categorical operations, and binders are eliminated with the
/// generic λ_x.
pub fn term_to_poly<W: CccOps>(
    w: &mut W,
    ctx: &mut Vec<crate::lam::Var>,
    t: crate::lam::TermId,
) -> Result<Poly<W::Arr>> {
    use crate::lam::Term;
    match w.term_node(t) {
        Term::Var(ty, depth) => {
            let v = crate::lam::Var { ty, depth };
            match ctx.iter().rposition(|&u| u == v) {
                Some(i) => Ok(Poly::Indet(i)),
                None => Err(Error::NotABulletin(alloc::format!(
                    "variable of depth {depth} outside the context"
                ))),
            }
        }
        Term::StarT => Ok(Poly::Atom(w.top()?)),
        Term::NameOf(a) => Ok(Poly::Atom(w.name_of_type(a)?)),
        Term::ConstT(k) => Ok(Poly::Atom(w.const_atom(k)?)),
        Term::Proj1T(u) => {
            let ty = w.term_ty(u);
            let Some((a, bb)) = w.view_wedge_ty(ty)? else {
                return Err(Error::Internal("projection at non-wedge type"));
            };
            let sa = w.of_type(a)?;
            let sb = w.of_type(bb)?;
            let p = w.proj1(&sa, &sb)?;
            let pu = term_to_poly(w, ctx, u)?;
            two_comp(w, Poly::Atom(p), pu)
        }
        Term::Proj2T(u) => {
            let ty = w.term_ty(u);
            let Some((a, bb)) = w.view_wedge_ty(ty)? else {
                return Err(Error::Internal("projection at non-wedge type"));
            };
            let sa = w.of_type(a)?;
            let sb = w.of_type(bb)?;
            let p = w.proj2(&sa, &sb)?;
            let pu = term_to_poly(w, ctx, u)?;
            two_comp(w, Poly::Atom(p), pu)
        }
        Term::PairT(u, v) => {
            let pu = term_to_poly(w, ctx, u)?;
            let pv = term_to_poly(w, ctx, v)?;
            two_pair(w, pu, pv)
        }
        Term::App(s, u) => {
            let ts = w.term_ty(s);
            let Some((a, bb)) = w.view_ent_ty(ts) else {
                return Err(Error::Internal("application at non-ent type"));
            };
            let sa = w.of_type(a)?;
            let sb = w.of_type(bb)?;
            let ev = w.eval(&sa, &sb)?;
            let ps = term_to_poly(w, ctx, s)?;
            let pu = term_to_poly(w, ctx, u)?;
            let arg = two_pair(w, ps, pu)?;
            two_comp(w, Poly::Atom(ev), arg)
        }
        Term::Lam(ty, depth, body) => {
            let y = crate::lam::Var { ty, depth };
            ctx.push(y);
            let pb = term_to_poly(w, ctx, body)?;
            let mut targets = Vec::new();
            for v in ctx.iter() {
                targets.push(w.of_type(v.ty)?);
            }
            let pctx = PolyCtx { targets };
            let xi = ctx.len() - 1;
            let out = {
                let mut pw = PolyWorld { ops: w, ctx: &pctx };
                pw.lambda(xi, &pb)?
            };
            ctx.pop();
            Ok(out)
        }
    }
}

fn two_comp<W: CccOps>(w: &mut W, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
    match (f, g) {
        (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(w.comp(&a, &b)?)),
        (f, g) => Ok(Poly::Comp(Box::new(f), Box::new(g))),
    }
}

fn two_pair<W: CccOps>(w: &mut W, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
    match (f, g) {
        (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(w.pair(&a, &b)?)),
        (f, g) => Ok(Poly::Pair(Box::new(f), Box::new(g))),
    }
}

/// The name `⌜f⌝ : ⊤ → (f̄ ⊢ f̂)`, generically: `(f · π′_{⊤, f̄})*`.
pub fn name_of<W: CccOps>(w: &mut W, f: &W::Arr) -> Result<W::Arr> {
    let s = w.src(f)?;
    let top = w.top()?;
    let p2 = w.proj2(&top, &s)?;
    let body = w.comp(f, &p2)?;
    w.star(&body)
}

/// A polynomial over a [`CccOps`] world: base atoms plus indeterminates.
/// Indeterminates are indices into a context of targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Poly<A> {
    Atom(A),
    Indet(usize),
    Comp(Box<Poly<A>>, Box<Poly<A>>),
    Ent(Box<Poly<A>>, Box<Poly<A>>),
    Wedge(Box<Poly<A>>, Box<Poly<A>>),
    Pair(Box<Poly<A>>, Box<Poly<A>>),
    Star(Box<Poly<A>>),
}

impl<A> Poly<A> {
    pub fn contains(&self, x: usize) -> bool {
        match self {
            Poly::Atom(_) => false,
            Poly::Indet(i) => *i == x,
            Poly::Comp(f, g)
            | Poly::Ent(f, g)
            | Poly::Wedge(f, g)
            | Poly::Pair(f, g) => f.contains(x) || g.contains(x),
            Poly::Star(f) => f.contains(x),
        }
    }

    pub fn has_indets(&self) -> bool {
        match self {
            Poly::Atom(_) => false,
            Poly::Indet(_) => true,
            Poly::Comp(f, g)
            | Poly::Ent(f, g)
            | Poly::Wedge(f, g)
            | Poly::Pair(f, g) => f.has_indets() || g.has_indets(),
            Poly::Star(f) => f.has_indets(),
        }
    }
}

/// Context of indeterminates: their targets (sources are all ⊤).
pub struct PolyCtx<A> {
    pub targets: Vec<A>,
}

/// Smart constructors keeping the invariant: an indeterminate-free
/// polynomial is a single atom.
pub struct PolyWorld<'a, W: CccOps> {
    pub ops: &'a mut W,
    pub ctx: &'a PolyCtx<W::Arr>,
}

impl<'a, W: CccOps> PolyWorld<'a, W> {
    fn two(
        &mut self,
        f: Poly<W::Arr>,
        g: Poly<W::Arr>,
        op: fn(&mut W, &W::Arr, &W::Arr) -> Result<W::Arr>,
        node: fn(Box<Poly<W::Arr>>, Box<Poly<W::Arr>>) -> Poly<W::Arr>,
    ) -> Result<Poly<W::Arr>> {
        match (f, g) {
            (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(op(self.ops, &a, &b)?)),
            (f, g) => Ok(node(Box::new(f), Box::new(g))),
        }
    }

    pub fn pcomp(&mut self, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        self.two(f, g, |w, a, b| w.comp(a, b), Poly::Comp)
    }

    pub fn ppair(&mut self, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        self.two(f, g, |w, a, b| w.pair(a, b), Poly::Pair)
    }

    pub fn pwedge(&mut self, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        self.two(f, g, |w, a, b| w.wedge(a, b), Poly::Wedge)
    }

    pub fn pent(&mut self, f: Poly<W::Arr>, g: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        self.two(f, g, |w, a, b| w.ent(a, b), Poly::Ent)
    }

    pub fn pstar(&mut self, f: Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        match f {
            Poly::Atom(a) => Ok(Poly::Atom(self.ops.star(&a)?)),
            f => Ok(Poly::Star(Box::new(f))),
        }
    }

    /// Source of a polynomial, as a polynomial.
    pub fn psrc(&mut self, p: &Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        match p {
            Poly::Atom(a) => Ok(Poly::Atom(self.ops.src(a)?)),
            Poly::Indet(_) => Ok(Poly::Atom(self.ops.top()?)),
            Poly::Comp(_, g) => self.psrc(g),
            Poly::Ent(a, _) => Ok((**a).clone()),
            Poly::Wedge(f, g) => {
                let sf = self.psrc(f)?;
                let sg = self.psrc(g)?;
                self.pwedge(sf, sg)
            }
            Poly::Pair(f, _) => self.psrc(f),
            Poly::Star(f) => {
                let s = self.psrc(f)?;
                let (a, _) = self.wedge_split(&s)?;
                Ok(a)
            }
        }
    }

    /// Target of a polynomial, as a polynomial.
    pub fn ptgt(&mut self, p: &Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        match p {
            Poly::Atom(a) => Ok(Poly::Atom(self.ops.tgt(a)?)),
            Poly::Indet(i) => Ok(Poly::Atom(self.ctx.targets[*i].clone())),
            Poly::Comp(f, _) => self.ptgt(f),
            Poly::Ent(_, b) => Ok((**b).clone()),
            Poly::Wedge(f, g) => {
                let tf = self.ptgt(f)?;
                let tg = self.ptgt(g)?;
                self.pwedge(tf, tg)
            }
            Poly::Pair(f, g) => {
                let tf = self.ptgt(f)?;
                let tg = self.ptgt(g)?;
                self.pwedge(tf, tg)
            }
            Poly::Star(f) => {
                let s = self.psrc(f)?;
                let (_, d) = self.wedge_split(&s)?;
                let t = self.ptgt(f)?;
                self.pent(d, t)
            }
        }
    }

    fn wedge_split(&mut self, p: &Poly<W::Arr>) -> Result<(Poly<W::Arr>, Poly<W::Arr>)> {
        match p {
            Poly::Wedge(a, b) => Ok(((**a).clone(), (**b).clone())),
            Poly::Atom(a) => match self.ops.wedge_parts(a)? {
                Some((x, y)) => Ok((Poly::Atom(x), Poly::Atom(y))),
                None => Err(Error::StarSourceNotWedge(format!("{a:?}"))),
            },
            _ => Err(Error::StarSourceNotWedge(format!("{p:?}"))),
        }
    }

    fn flatten(&mut self, p: &Poly<W::Arr>) -> Result<W::Arr> {
        match p {
            Poly::Atom(a) => Ok(a.clone()),
            _ => Err(Error::NotAPath(format!("{p:?}"))),
        }
    }

    /// κ_x: eliminate the indeterminate from a path with base boundaries,
    /// producing a witness `x̂ ∧ ā → b̂` by the case table of the Deduction
    /// Theorem proof. Sub-polynomials free of `x` are treated atomically.
    pub fn kappa(&mut self, x: usize, phi: &Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        let xt = self.ctx.targets[x].clone();
        if !phi.contains(x) {
            // Constant case: φ · π′_{x̂, ā}.
            let a = self.psrc(phi)?;
            let a = self.flatten_base(&a)?;
            let p2 = self.ops.proj2(&xt, &a)?;
            return self.pcomp(phi.clone(), Poly::Atom(p2));
        }
        match phi {
            Poly::Indet(i) if *i == x => {
                // The variable: π_{x̂, ⊤}.
                let top = self.ops.top()?;
                Ok(Poly::Atom(self.ops.proj1(&xt, &top)?))
            }
            Poly::Indet(_) => unreachable!("covered by the constant case"),
            Poly::Atom(_) => unreachable!("atoms are x-free"),
            Poly::Ent(..) => Err(Error::NotAPath(
                "type edge mentioning the indeterminate has non-base boundaries".into(),
            )),
            Poly::Comp(psi, chi) => {
                // κψ · ⟨π_{x̂,a}, κχ⟩ with a the source of the whole path.
                let a = self.psrc(chi)?;
                let a = self.flatten_base(&a)?;
                let kpsi = self.kappa(x, psi)?;
                let kchi = self.kappa(x, chi)?;
                let p1 = self.ops.proj1(&xt, &a)?;
                let arg = self.ppair(Poly::Atom(p1), kchi)?;
                self.pcomp(kpsi, arg)
            }
            Poly::Wedge(psi, chi) => {
                // ⟨κψ · m₁, κχ · m₂⟩ with mᵢ the evident mungers
                // x̂∧(ψ̄∧χ̄) → x̂∧ψ̄ and → x̂∧χ̄.
                let sp = self.psrc(psi)?;
                let sp = self.flatten_base(&sp)?;
                let sc = self.psrc(chi)?;
                let sc = self.flatten_base(&sc)?;
                let a = self.ops.wedge(&sp, &sc)?;
                let p1a = self.ops.proj1(&xt, &a)?;
                let p2a = self.ops.proj2(&xt, &a)?;
                let pp = self.ops.proj1(&sp, &sc)?;
                let pq = self.ops.proj2(&sp, &sc)?;
                let m1r = self.ops.comp(&pp, &p2a)?;
                let m1 = self.ops.pair(&p1a, &m1r)?;
                let m2r = self.ops.comp(&pq, &p2a)?;
                let m2 = self.ops.pair(&p1a, &m2r)?;
                let kpsi = self.kappa(x, psi)?;
                let kchi = self.kappa(x, chi)?;
                let l = self.pcomp(kpsi, Poly::Atom(m1))?;
                let r = self.pcomp(kchi, Poly::Atom(m2))?;
                self.ppair(l, r)
            }
            Poly::Pair(psi, chi) => {
                let kpsi = self.kappa(x, psi)?;
                let kchi = self.kappa(x, chi)?;
                self.ppair(kpsi, kchi)
            }
            Poly::Star(psi) => {
                // (κψ · α)* with α : (x̂∧c)∧d → x̂∧(c∧d) the associator.
                let s = self.psrc(psi)?;
                let (c, d) = self.wedge_split(&s)?;
                let c = self.flatten_base(&c)?;
                let d = self.flatten_base(&d)?;
                let xc = self.ops.wedge(&xt, &c)?;
                let p_out1 = self.ops.proj1(&xc, &d)?;
                let p_out2 = self.ops.proj2(&xc, &d)?;
                let p_in1 = self.ops.proj1(&xt, &c)?;
                let p_in2 = self.ops.proj2(&xt, &c)?;
                let a1 = self.ops.comp(&p_in1, &p_out1)?;
                let a2l = self.ops.comp(&p_in2, &p_out1)?;
                let a2 = self.ops.pair(&a2l, &p_out2)?;
                let alpha = self.ops.pair(&a1, &a2)?;
                let kpsi = self.kappa(x, psi)?;
                let body = self.pcomp(kpsi, Poly::Atom(alpha))?;
                self.pstar(body)
            }
        }
    }

    fn flatten_base(&mut self, p: &Poly<W::Arr>) -> Result<W::Arr> {
        self.flatten(p)
    }

    /// ε_x φ := κ_x(φ) · β with β = ⟨1_{x̂}, x̂ ⊢ ⊤⟩, the unique base element
    /// with ε_x(φ) · x = φ, for φ sourced at ⊤.
    pub fn epsilon(&mut self, x: usize, phi: &Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        let s = self.psrc(phi)?;
        let s = self.flatten(&s)?;
        let top = self.ops.top()?;
        if !self.ops.eq(&s, &top)? {
            return Err(Error::NotClosedSource(format!("{s:?}")));
        }
        let xt = self.ctx.targets[x].clone();
        let one = self.ops.id(&xt)?;
        let ter = self.ops.ent(&xt, &top)?;
        let beta = self.ops.pair(&one, &ter)?;
        let k = self.kappa(x, phi)?;
        self.pcomp(k, Poly::Atom(beta))
    }

    /// λ_x φ := ⌜ε_x φ⌝ : ⊤ → (x̂ ⊢ φ̂).
    pub fn lambda(&mut self, x: usize, phi: &Poly<W::Arr>) -> Result<Poly<W::Arr>> {
        let eps = self.epsilon(x, phi)?;
        match eps {
            Poly::Atom(g) => Ok(Poly::Atom(name_of(self.ops, &g)?)),
            p => {
                // Name of a polynomial arrow (appears in iterated contexts).
                let s = self.psrc(&p)?;
                let s = self.flatten(&s)?;
                let top = self.ops.top()?;
                let p2 = self.ops.proj2(&top, &s)?;
                let body = self.pcomp(p, Poly::Atom(p2))?;
                self.pstar(body)
            }
        }
    }
}

// ----- the free world ------------------------------------------------------

/// The free ideal cartesian closed category over the world's presentation:
/// arrows are interned normal forms.
pub struct FreeCat<'a> {
    pub world: &'a mut World,
}

impl<'a> CccOps for FreeCat<'a> {
    type Arr = ExprId;

    fn src(&mut self, a: &ExprId) -> Result<ExprId> {
        Ok(self.world.source(*a))
    }
    fn tgt(&mut self, a: &ExprId) -> Result<ExprId> {
        Ok(self.world.target(*a))
    }
    fn comp(&mut self, f: &ExprId, g: &ExprId) -> Result<ExprId> {
        self.world.comp(*f, *g)
    }
    fn id(&mut self, a: &ExprId) -> Result<ExprId> {
        self.world.id(*a)
    }
    fn top(&mut self) -> Result<ExprId> {
        Ok(self.world.top())
    }
    fn wedge(&mut self, a: &ExprId, b: &ExprId) -> Result<ExprId> {
        self.world.wedge(*a, *b)
    }
    fn pair(&mut self, f: &ExprId, g: &ExprId) -> Result<ExprId> {
        self.world.pair(*f, *g)
    }
    fn star(&mut self, f: &ExprId) -> Result<ExprId> {
        self.world.star(*f)
    }
    fn ent(&mut self, a: &ExprId, b: &ExprId) -> Result<ExprId> {
        self.world.ent(*a, *b)
    }
    fn proj1(&mut self, a: &ExprId, b: &ExprId) -> Result<ExprId> {
        self.world.proj1(*a, *b)
    }
    fn proj2(&mut self, a: &ExprId, b: &ExprId) -> Result<ExprId> {
        self.world.proj2(*a, *b)
    }
    fn eval(&mut self, a: &ExprId, b: &ExprId) -> Result<ExprId> {
        self.world.eval(*a, *b)
    }
    fn wedge_parts(&mut self, a: &ExprId) -> Result<Option<(ExprId, ExprId)>> {
        self.world.wedge_components(*a)
    }
    fn eq(&mut self, f: &ExprId, g: &ExprId) -> Result<bool> {
        Ok(f == g)
    }
    fn of_type(&mut self, ty: ExprId) -> Result<ExprId> {
        Ok(ty)
    }
    fn name_of_type(&mut self, ty: ExprId) -> Result<ExprId> {
        self.world.name_arrow(ty)
    }
    fn const_atom(&mut self, k: NameId) -> Result<ExprId> {
        self.world.gen_expr(k)
    }
    fn term_node(&self, t: crate::lam::TermId) -> crate::lam::Term {
        self.world.term_node(t)
    }
    fn term_ty(&self, t: crate::lam::TermId) -> ExprId {
        self.world.ty(t)
    }
    fn type_node(&self, ty: ExprId) -> Expr {
        self.world.node(ty)
    }
    fn view_ent_ty(&self, ty: ExprId) -> Option<(ExprId, ExprId)> {
        self.world.view_ent_full(ty)
    }
    fn view_wedge_ty(&mut self, ty: ExprId) -> Result<Option<(ExprId, ExprId)>> {
        self.world.view_wedge(ty)
    }
}

/// Convert an interned expression over a context of indeterminates into a
/// polynomial: maximal indeterminate-free subtrees become atoms.
pub fn expr_to_poly(world: &World, ctx_names: &[NameId], e: ExprId) -> Result<Poly<ExprId>> {
    if !world.has_indet(e) {
        return Ok(Poly::Atom(e));
    }
    match world.node(e) {
        Expr::Indet(n) => match ctx_names.iter().position(|&m| m == n) {
            Some(i) => Ok(Poly::Indet(i)),
            None => Err(Error::UnknownIndeterminate(world.name_str(n).into())),
        },
        Expr::Comp(f, g) => Ok(Poly::Comp(
            Box::new(expr_to_poly(world, ctx_names, f)?),
            Box::new(expr_to_poly(world, ctx_names, g)?),
        )),
        Expr::Ent(a, b) => Ok(Poly::Ent(
            Box::new(expr_to_poly(world, ctx_names, a)?),
            Box::new(expr_to_poly(world, ctx_names, b)?),
        )),
        Expr::Wedge(f, g) => Ok(Poly::Wedge(
            Box::new(expr_to_poly(world, ctx_names, f)?),
            Box::new(expr_to_poly(world, ctx_names, g)?),
        )),
        Expr::Pair(f, g) => Ok(Poly::Pair(
            Box::new(expr_to_poly(world, ctx_names, f)?),
            Box::new(expr_to_poly(world, ctx_names, g)?),
        )),
        Expr::Star(f) => Ok(Poly::Star(Box::new(expr_to_poly(world, ctx_names, f)?))),
        Expr::Id(_) => Err(Error::NotAPath(
            "identity on an indeterminate-containing element".into(),
        )),
        Expr::Proj1(..) | Expr::Proj2(..) | Expr::Eval(..) | Expr::Gen(_) | Expr::Top => {
            unreachable!("indeterminate-free atoms handled above")
        }
    }
}

fn free_ctx(world: &mut World) -> Result<(Vec<NameId>, PolyCtx<ExprId>)> {
    let names = world.indet_names();
    let mut targets = Vec::new();
    for &n in &names {
        let t = world
            .indet_target(n)
            .ok_or_else(|| Error::UnknownIndeterminate(world.name_str(n).into()))?;
        targets.push(t);
    }
    Ok((names, PolyCtx { targets }))
}

fn run_free<F>(world: &mut World, x: NameId, phi: ExprId, f: F) -> Result<ExprId>
where
    F: FnOnce(&mut PolyWorld<'_, FreeCat<'_>>, usize, &Poly<ExprId>) -> Result<Poly<ExprId>>,
{
    let (names, ctx) = free_ctx(world)?;
    let xi = names
        .iter()
        .position(|&n| n == x)
        .ok_or_else(|| Error::UnknownIndeterminate(world.name_str(x).into()))?;
    let poly = expr_to_poly(world, &names, phi)?;
    let mut ops = FreeCat { world };
    let mut pw = PolyWorld { ops: &mut ops, ctx: &ctx };
    let out = f(&mut pw, xi, &poly)?;
    match out {
        Poly::Atom(a) => Ok(a),
        other => {
            // Remaining indeterminates: rebuild as an interned expression.
            poly_to_expr(pw.ops.world, &names, &other)
        }
    }
}

fn poly_to_expr(world: &mut World, names: &[NameId], p: &Poly<ExprId>) -> Result<ExprId> {
    match p {
        Poly::Atom(a) => Ok(*a),
        Poly::Indet(i) => world.indet_expr(names[*i]),
        Poly::Comp(f, g) => {
            let f = poly_to_expr(world, names, f)?;
            let g = poly_to_expr(world, names, g)?;
            world.comp(f, g)
        }
        Poly::Ent(a, b) => {
            let a = poly_to_expr(world, names, a)?;
            let b = poly_to_expr(world, names, b)?;
            world.ent(a, b)
        }
        Poly::Wedge(f, g) => {
            let f = poly_to_expr(world, names, f)?;
            let g = poly_to_expr(world, names, g)?;
            world.wedge(f, g)
        }
        Poly::Pair(f, g) => {
            let f = poly_to_expr(world, names, f)?;
            let g = poly_to_expr(world, names, g)?;
            world.pair(f, g)
        }
        Poly::Star(f) => {
            let f = poly_to_expr(world, names, f)?;
            world.star(f)
        }
    }
}

/// κ_x over the free world: the base witness `x̂ ∧ ā → b̂` with no
/// occurrence of `x`.
pub fn kappa(world: &mut World, x: NameId, phi: ExprId) -> Result<ExprId> {
    // Boundaries must be in the base.
    if world.has_indet(world.source(phi)) || world.has_indet(world.target(phi)) {
        return Err(Error::NotAPath(world.render(phi)));
    }
    run_free(world, x, phi, |pw, xi, poly| pw.kappa(xi, poly))
}

/// ε_x over the free world.
pub fn epsilon_x(world: &mut World, x: NameId, phi: ExprId) -> Result<ExprId> {
    run_free(world, x, phi, |pw, xi, poly| pw.epsilon(xi, poly))
}

/// λ_x over the free world.
pub fn lambda_x(world: &mut World, x: NameId, phi: ExprId) -> Result<ExprId> {
    run_free(world, x, phi, |pw, xi, poly| pw.lambda(xi, poly))
}

/// Decide `=_x` between polynomials over the same context.
pub fn eq_x(world: &mut World, p: ExprId, q: ExprId) -> Result<bool> {
    crate::iccc::equal(world, p, q)
}

/// `S_x^a`: substitute `a` for the indeterminate `x` (homomorphically,
/// renormalizing). The target of `a` must be `x̂`; its source is free.
pub fn substitute(world: &mut World, x: NameId, a: ExprId, p: ExprId) -> Result<ExprId> {
    let xt = world
        .indet_target(x)
        .ok_or_else(|| Error::UnknownIndeterminate(world.name_str(x).into()))?;
    if world.target(a) != xt {
        return Err(Error::TargetMismatch {
            expected: world.render(xt),
            found: world.render(world.target(a)),
        });
    }
    subst_walk(world, x, a, p)
}

fn subst_walk(world: &mut World, x: NameId, a: ExprId, p: ExprId) -> Result<ExprId> {
    if !world.has_indet(p) {
        return Ok(p);
    }
    match world.node(p) {
        Expr::Indet(n) if n == x => Ok(a),
        Expr::Indet(_) => Ok(p),
        Expr::Gen(_) | Expr::Top => Ok(p),
        Expr::Id(e) => {
            let e = subst_walk(world, x, a, e)?;
            world.id(e)
        }
        Expr::Comp(f, g) => {
            let f = subst_walk(world, x, a, f)?;
            let g = subst_walk(world, x, a, g)?;
            world.comp(f, g)
        }
        Expr::Ent(u, v) => {
            let u = subst_walk(world, x, a, u)?;
            let v = subst_walk(world, x, a, v)?;
            world.ent(u, v)
        }
        Expr::Wedge(f, g) => {
            let f = subst_walk(world, x, a, f)?;
            let g = subst_walk(world, x, a, g)?;
            world.wedge(f, g)
        }
        Expr::Pair(f, g) => {
            let f = subst_walk(world, x, a, f)?;
            let g = subst_walk(world, x, a, g)?;
            world.pair(f, g)
        }
        Expr::Star(f) => {
            let f = subst_walk(world, x, a, f)?;
            world.star(f)
        }
        Expr::Proj1(u, v) => {
            let u = subst_walk(world, x, a, u)?;
            let v = subst_walk(world, x, a, v)?;
            world.proj1(u, v)
        }
        Expr::Proj2(u, v) => {
            let u = subst_walk(world, x, a, u)?;
            let v = subst_walk(world, x, a, v)?;
            world.proj2(u, v)
        }
        Expr::Eval(u, v) => {
            let u = subst_walk(world, x, a, u)?;
            let v = subst_walk(world, x, a, v)?;
            world.eval(u, v)
        }
    }
}

/// Extend a morphism to the polynomial category by giving the image of the
/// indeterminate; the unique functor with `θ(x) = a`, `θ|base = F`.
pub struct ExtendedMorphism {
    pub base: crate::gencat::FiniteFunctorData,
    pub indet_image: (NameId, ExprId),
}

impl ExtendedMorphism {
    pub fn apply(&self, src: &World, dst: &mut World, e: ExprId) -> Result<ExprId> {
        match src.node(e) {
            Expr::Indet(n) if n == self.indet_image.0 => Ok(self.indet_image.1),
            Expr::Indet(n) => Err(Error::UnknownIndeterminate(src.name_str(n).into())),
            Expr::Gen(_) => self.base.apply(src, dst, e),
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

/// Extend `F` along `x ↦ a`; checks `a : F(x̄) → F(x̂)`.
pub fn extend_functor(
    base: crate::gencat::FiniteFunctorData,
    src: &mut World,
    dst: &mut World,
    x: NameId,
    a: ExprId,
) -> Result<ExtendedMorphism> {
    let xt = src
        .indet_target(x)
        .ok_or_else(|| Error::UnknownIndeterminate(src.name_str(x).into()))?;
    let fxt = base.apply(src, dst, xt)?;
    if dst.target(a) != fxt {
        return Err(Error::TargetMismatch {
            expected: dst.render(fxt),
            found: dst.render(dst.target(a)),
        });
    }
    Ok(ExtendedMorphism { base, indet_image: (x, a) })
}

/// The two directions of the Deduction Theorem, with replayed validity.
pub struct DeductionWitnesses {
    /// Base witness of `x̂ ∧ a ⊢ b` (contains no `x`).
    pub base: crate::dedsys::Witness,
    /// Polynomial witness of `a ⊢ b` in the extended system.
    pub extended: crate::dedsys::Witness,
}

/// Deduction Theorem: search `a ⊢ b` in the extended system and eliminate
/// `x` via κ; or search `x̂ ∧ a ⊢ b` in the base and re-introduce `x` via
/// `f · ⟨x · (a ⊢ ⊤), 1_a⟩`.
pub fn deduction_theorem(
    world: &mut World,
    x: NameId,
    a: ExprId,
    b: ExprId,
    depth: u32,
) -> Result<Option<DeductionWitnesses>> {
    let xt = world
        .indet_target(x)
        .ok_or_else(|| Error::UnknownIndeterminate(world.name_str(x).into()))?;
    if world.has_indet(a) || world.has_indet(b) {
        return Err(Error::NotAPath("boundaries must be in the base".into()));
    }
    // Forward: a witness in the extended system, then κ.
    if let Some(w) = crate::dedsys::inhabit(world, a, b, depth)? {
        let base_expr = kappa(world, x, w.expr)?;
        let base = crate::dedsys::Witness::checked(world, base_expr, depth)?;
        return Ok(Some(DeductionWitnesses { base, extended: w }));
    }
    // Backward: a base witness of x̂ ∧ a → b, then re-introduction.
    let xa = world.wedge(xt, a)?;
    if let Some(w) = crate::dedsys::inhabit(world, xa, b, depth)? {
        let xe = world.indet_expr(x)?;
        let top = world.top();
        let ter = world.ent(a, top)?;
        let xleg = world.comp(xe, ter)?;
        let one = world.id(a)?;
        let phi = world.pair(xleg, one)?;
        let ext_expr = world.comp(w.expr, phi)?;
        let extended = crate::dedsys::Witness::checked(world, ext_expr, depth)?;
        return Ok(Some(DeductionWitnesses { base: w, extended }));
    }
    Ok(None)
}
