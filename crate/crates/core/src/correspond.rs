//! The two sides of the correspondence: the symbol category built from a
//! lambda calculus, the internal language of an ideal cartesian closed
//! category, the unit and counit maps, and round-trip verification of the
//! triangle laws.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprId, NameId, World};
use crate::lam::{LambdaCalculus, Term, TermId, Translation, Var};
use crate::poly::{term_to_poly, CccOps, Poly, PolyCtx, PolyWorld};
use crate::rng::KernelRng;

/// An arrow of the symbol category: a canonical pair ⟨x | s⟩ of a binder
/// and a bulletin body. Canonical form: body normalized, the free variable
/// renamed to the least standard variable, mismatched-variable bodies
/// replaced by the least fresh variable of the body's type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Symbol {
    pub binder: Var,
    pub body: TermId,
}

/// Canonicalize a symbol. Bodies may have at most one free variable.
pub fn canonical_symbol(
    world: &mut World,
    calc: &LambdaCalculus,
    binder: Var,
    body: TermId,
) -> Result<Symbol> {
    let body = world.normalize_term(body)?;
    let fv = world.free_vars(calc, body);
    match fv.len() {
        0 => Ok(Symbol { binder: Var { ty: binder.ty, depth: 1 }, body }),
        1 => {
            let v = fv[0];
            if v.ty == binder.ty {
                // A proper bulletin: rename its variable to depth 1.
                let least = Var { ty: binder.ty, depth: 1 };
                let body = if v == least {
                    body
                } else {
                    let lv = world.var_term(least.ty, least.depth)?;
                    let renamed = world.subst(body, v, lv)?;
                    world.normalize_term(renamed)?
                };
                Ok(Symbol { binder: least, body })
            } else {
                // Mismatched variable: the symbol is a type edge; the body
                // collapses to the least fresh variable of its type.
                let bt = world.ty(body);
                let depth = if bt == binder.ty { 2 } else { 1 };
                let body = world.var_term(bt, depth)?;
                Ok(Symbol { binder: Var { ty: binder.ty, depth: 1 }, body })
            }
        }
        n => Err(Error::NotABulletin(format!("symbol body has {n} free variables"))),
    }
}

/// The subject ⟨• | A⟩ for a type expression.
pub fn subject(world: &mut World, calc: &LambdaCalculus, a: ExprId) -> Result<Symbol> {
    let src = world.source(a);
    let x = world.var_term(src, 1)?;
    let n = world.name_term(a)?;
    let body = world.app_term(n, x)?;
    canonical_symbol(world, calc, Var { ty: src, depth: 1 }, body)
}

/// The type expression represented by a symbol: the 6c readback for proper
/// bulletins, `ty(x) ⊢ ty(y)` for type symbols.
pub fn symbol_type(world: &mut World, calc: &LambdaCalculus, s: &Symbol) -> Result<ExprId> {
    if let Term::Var(ty, depth) = world.term_node(s.body) {
        let v = Var { ty, depth };
        if v != s.binder && !calc.validating.contains(&v) {
            return world.ent(s.binder.ty, ty);
        }
    }
    world.term_to_arrow(s.body, &[s.binder])
}

/// The symbol category of a lambda calculus, as the ideal cartesian closed
/// operations on canonical symbols.
pub struct SymbolCat<'a> {
    pub world: &'a mut World,
    pub calc: &'a LambdaCalculus,
}

impl<'a> SymbolCat<'a> {
    fn canon(&mut self, binder: Var, body: TermId) -> Result<Symbol> {
        canonical_symbol(self.world, self.calc, binder, body)
    }

    fn fresh_binder(&mut self, ty: ExprId, avoid_terms: &[TermId]) -> Var {
        let mut depth = 1;
        let mut avoid = BTreeSet::new();
        for &t in avoid_terms {
            self.world.all_vars(t, &mut avoid);
        }
        while avoid.contains(&Var { ty, depth }) {
            depth += 1;
        }
        Var { ty, depth }
    }
}

impl<'a> CccOps for SymbolCat<'a> {
    type Arr = Symbol;

    fn src(&mut self, a: &Symbol) -> Result<Symbol> {
        let ty = a.binder.ty;
        subject(self.world, self.calc, ty)
    }

    fn tgt(&mut self, a: &Symbol) -> Result<Symbol> {
        let ty = self.world.ty(a.body);
        subject(self.world, self.calc, ty)
    }

    fn comp(&mut self, f: &Symbol, g: &Symbol) -> Result<Symbol> {
        // ⟨x|s⟩ · ⟨y|t⟩ = ⟨y′ | s[x/t]⟩.
        if self.world.ty(g.body) != f.binder.ty {
            return Err(Error::NotComposable {
                left_source: self.world.render(f.binder.ty),
                right_target: self.world.render(self.world.ty(g.body)),
            });
        }
        let s = self.world.subst(f.body, f.binder, g.body)?;
        self.canon(g.binder, s)
    }

    fn id(&mut self, a: &Symbol) -> Result<Symbol> {
        // 1_{⟨x|s⟩} = ⟨y|y⟩ with y of the represented type.
        let t = symbol_type(self.world, self.calc, a)?;
        let y = self.world.var_term(t, 1)?;
        self.canon(Var { ty: t, depth: 1 }, y)
    }

    fn top(&mut self) -> Result<Symbol> {
        let top = self.world.top();
        let body = self.world.star_term();
        self.canon(Var { ty: top, depth: 1 }, body)
    }

    fn wedge(&mut self, f: &Symbol, g: &Symbol) -> Result<Symbol> {
        // ⟨z | ⟨s[x/π z], t[y/π′ z]⟩⟩.
        let a = f.binder.ty;
        let bb = g.binder.ty;
        let w = self.world.wedge(a, bb)?;
        let z = self.fresh_binder(w, &[f.body, g.body]);
        let zv = self.world.var_term(z.ty, z.depth)?;
        let p1 = self.world.proj1_term(zv)?;
        let p2 = self.world.proj2_term(zv)?;
        let s = self.world.subst(f.body, f.binder, p1)?;
        let t = self.world.subst(g.body, g.binder, p2)?;
        let body = self.world.pair_term(s, t)?;
        self.canon(z, body)
    }

    fn pair(&mut self, f: &Symbol, g: &Symbol) -> Result<Symbol> {
        if f.binder.ty != g.binder.ty {
            return Err(Error::PairSourceMismatch {
                left: self.world.render(f.binder.ty),
                right: self.world.render(g.binder.ty),
            });
        }
        let z = self.fresh_binder(f.binder.ty, &[f.body, g.body]);
        let zv = self.world.var_term(z.ty, z.depth)?;
        let s = self.world.subst(f.body, f.binder, zv)?;
        let t = self.world.subst(g.body, g.binder, zv)?;
        let body = self.world.pair_term(s, t)?;
        self.canon(z, body)
    }

    fn star(&mut self, f: &Symbol) -> Result<Symbol> {
        // ⟨z : A∧B | s⟩* = ⟨x : A | λ(y : B, s[z/⟨x,y⟩])⟩.
        let Expr::Wedge(a, bb) = self.world.node(f.binder.ty) else {
            return Err(Error::StarSourceNotWedge(self.world.render(f.binder.ty)));
        };
        let x = self.fresh_binder(a, &[f.body]);
        let xv = self.world.var_term(x.ty, x.depth)?;
        let mut avoid = BTreeSet::new();
        self.world.all_vars(f.body, &mut avoid);
        let mut ydepth = 1;
        while avoid.contains(&Var { ty: bb, depth: ydepth }) || (bb == a && ydepth == x.depth) {
            ydepth += 1;
        }
        let y = Var { ty: bb, depth: ydepth };
        let yv = self.world.var_term(y.ty, y.depth)?;
        let arg = self.world.pair_term(xv, yv)?;
        let s = self.world.subst(f.body, f.binder, arg)?;
        let body = self.world.lam_term(y, s)?;
        self.canon(x, body)
    }

    fn ent(&mut self, a: &Symbol, b: &Symbol) -> Result<Symbol> {
        if a == b {
            return self.id(a);
        }
        let ta = symbol_type(self.world, self.calc, a)?;
        let tb = symbol_type(self.world, self.calc, b)?;
        let depth = if tb == ta { 2 } else { 1 };
        let body = self.world.var_term(tb, depth)?;
        self.canon(Var { ty: ta, depth: 1 }, body)
    }

    fn proj1(&mut self, a: &Symbol, b: &Symbol) -> Result<Symbol> {
        let ta = symbol_type(self.world, self.calc, a)?;
        let tb = symbol_type(self.world, self.calc, b)?;
        let w = self.world.wedge(ta, tb)?;
        let zv = self.world.var_term(w, 1)?;
        let body = self.world.proj1_term(zv)?;
        self.canon(Var { ty: w, depth: 1 }, body)
    }

    fn proj2(&mut self, a: &Symbol, b: &Symbol) -> Result<Symbol> {
        let ta = symbol_type(self.world, self.calc, a)?;
        let tb = symbol_type(self.world, self.calc, b)?;
        let w = self.world.wedge(ta, tb)?;
        let zv = self.world.var_term(w, 1)?;
        let body = self.world.proj2_term(zv)?;
        self.canon(Var { ty: w, depth: 1 }, body)
    }

    fn eval(&mut self, a: &Symbol, b: &Symbol) -> Result<Symbol> {
        // ε = ⟨z | π(z) ≀ π′(z)⟩.
        let ta = symbol_type(self.world, self.calc, a)?;
        let tb = symbol_type(self.world, self.calc, b)?;
        let e = self.world.ent(ta, tb)?;
        let w = self.world.wedge(e, ta)?;
        let zv = self.world.var_term(w, 1)?;
        let p1 = self.world.proj1_term(zv)?;
        let p2 = self.world.proj2_term(zv)?;
        let body = self.world.app_term(p1, p2)?;
        self.canon(Var { ty: w, depth: 1 }, body)
    }

    fn wedge_parts(&mut self, a: &Symbol) -> Result<Option<(Symbol, Symbol)>> {
        let t = symbol_type(self.world, self.calc, a)?;
        match self.world.node(t) {
            Expr::Wedge(x, y) => {
                let sx = subject(self.world, self.calc, x)?;
                let sy = subject(self.world, self.calc, y)?;
                Ok(Some((sx, sy)))
            }
            _ => Ok(None),
        }
    }

    fn eq(&mut self, f: &Symbol, g: &Symbol) -> Result<bool> {
        Ok(f == g)
    }

    fn of_type(&mut self, ty: ExprId) -> Result<Symbol> {
        subject(self.world, self.calc, ty)
    }

    fn name_of_type(&mut self, ty: ExprId) -> Result<Symbol> {
        let top = self.world.top();
        let body = self.world.name_term(ty)?;
        self.canon(Var { ty: top, depth: 1 }, body)
    }

    fn const_atom(&mut self, k: NameId) -> Result<Symbol> {
        let top = self.world.top();
        let body = self.world.const_term(k)?;
        self.canon(Var { ty: top, depth: 1 }, body)
    }

    fn term_node(&self, t: TermId) -> Term {
        self.world.term_node(t)
    }

    fn term_ty(&self, t: TermId) -> ExprId {
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

/// The internal language of the free ideal cartesian closed category over
/// the world's presentation: types are the elements themselves, terms are
/// source-⊤ polynomials (expressions over the declared indeterminates).
pub fn build_internal_language() -> LambdaCalculus {
    LambdaCalculus::new()
}

/// `C` on morphisms: a translation of calculi induces a map of symbols.
pub fn functor_c(
    phi: &Translation,
    src: &World,
    dst: &mut World,
    dst_calc: &LambdaCalculus,
    sym: &Symbol,
) -> Result<Symbol> {
    let bty = phi.apply_type(src, dst, sym.binder.ty)?;
    let body = phi.apply_term(src, dst, sym.body)?;
    canonical_symbol(dst, dst_calc, Var { ty: bty, depth: sym.binder.depth }, body)
}

/// `L` on morphisms: an ideal-ccc morphism acts on internal-language types
/// by application and on terms (source-⊤ polynomials) homomorphically with
/// `L F(α·) = (L F(α))·`.
pub fn functor_l(
    f: &crate::iccc::IcccMorphism,
    src: &World,
    dst: &mut World,
    term: ExprId,
) -> Result<ExprId> {
    match src.node(term) {
        Expr::Indet(n) => {
            let id = dst
                .lookup_name(src.name_str(n))
                .ok_or_else(|| Error::UnknownIndeterminate(src.name_str(n).into()))?;
            dst.indet_expr(id)
        }
        Expr::Comp(x, y) => {
            let x = functor_l(f, src, dst, x)?;
            let y = functor_l(f, src, dst, y)?;
            dst.comp(x, y)
        }
        Expr::Ent(x, y) => {
            let x = functor_l(f, src, dst, x)?;
            let y = functor_l(f, src, dst, y)?;
            dst.ent(x, y)
        }
        Expr::Wedge(x, y) => {
            let x = functor_l(f, src, dst, x)?;
            let y = functor_l(f, src, dst, y)?;
            dst.wedge(x, y)
        }
        Expr::Pair(x, y) => {
            let x = functor_l(f, src, dst, x)?;
            let y = functor_l(f, src, dst, y)?;
            dst.pair(x, y)
        }
        Expr::Star(x) => {
            let x = functor_l(f, src, dst, x)?;
            dst.star(x)
        }
        Expr::Id(x) => {
            let x = functor_l(f, src, dst, x)?;
            dst.id(x)
        }
        _ => f.apply(src, dst, term),
    }
}

/// η on types: `A ↦ A_{⟨•|A⟩}`, and on internal-language terms: structural,
/// with indeterminates kept and constant subterms sent to their closed
/// symbols.
pub fn eta_type(world: &mut World, calc: &LambdaCalculus, a: ExprId) -> Result<Symbol> {
    subject(world, calc, a)
}

/// η on internal-language terms (source-⊤ polynomials over the world).
pub fn eta_term(
    world: &mut World,
    calc: &LambdaCalculus,
    ctx_names: &[NameId],
    term: ExprId,
) -> Result<Poly<Symbol>> {
    if !world.has_indet(term) {
        // A constant term k becomes the closed symbol ⟨x : ⊤ | k⟩.
        let top = world.top();
        let x = world.var_term(top, 1)?;
        let body = world.act(term, x)?;
        let sym = canonical_symbol(world, calc, Var { ty: top, depth: 1 }, body)?;
        return Ok(Poly::Atom(sym));
    }
    match world.node(term) {
        Expr::Indet(n) => match ctx_names.iter().position(|&m| m == n) {
            Some(i) => Ok(Poly::Indet(i)),
            None => Err(Error::UnknownIndeterminate(world.name_str(n).into())),
        },
        Expr::Comp(f, g) => {
            let pf = eta_term(world, calc, ctx_names, f)?;
            let pg = eta_term(world, calc, ctx_names, g)?;
            let mut cat = SymbolCat { world, calc };
            match (pf, pg) {
                (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(cat.comp(&a, &b)?)),
                (pf, pg) => Ok(Poly::Comp(alloc::boxed::Box::new(pf), alloc::boxed::Box::new(pg))),
            }
        }
        Expr::Pair(f, g) => {
            let pf = eta_term(world, calc, ctx_names, f)?;
            let pg = eta_term(world, calc, ctx_names, g)?;
            let mut cat = SymbolCat { world, calc };
            match (pf, pg) {
                (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(cat.pair(&a, &b)?)),
                (pf, pg) => Ok(Poly::Pair(alloc::boxed::Box::new(pf), alloc::boxed::Box::new(pg))),
            }
        }
        Expr::Wedge(f, g) => {
            let pf = eta_term(world, calc, ctx_names, f)?;
            let pg = eta_term(world, calc, ctx_names, g)?;
            let mut cat = SymbolCat { world, calc };
            match (pf, pg) {
                (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(cat.wedge(&a, &b)?)),
                (pf, pg) => {
                    Ok(Poly::Wedge(alloc::boxed::Box::new(pf), alloc::boxed::Box::new(pg)))
                }
            }
        }
        Expr::Ent(f, g) => {
            let pf = eta_term(world, calc, ctx_names, f)?;
            let pg = eta_term(world, calc, ctx_names, g)?;
            let mut cat = SymbolCat { world, calc };
            match (pf, pg) {
                (Poly::Atom(a), Poly::Atom(b)) => Ok(Poly::Atom(cat.ent(&a, &b)?)),
                (pf, pg) => Ok(Poly::Ent(alloc::boxed::Box::new(pf), alloc::boxed::Box::new(pg))),
            }
        }
        Expr::Star(f) => {
            let pf = eta_term(world, calc, ctx_names, f)?;
            let mut cat = SymbolCat { world, calc };
            match pf {
                Poly::Atom(a) => Ok(Poly::Atom(cat.star(&a)?)),
                pf => Ok(Poly::Star(alloc::boxed::Box::new(pf))),
            }
        }
        _ => Err(Error::MalformedExpr(format!(
            "not an internal-language term: {}",
            world.render(term)
        ))),
    }
}

/// ε for the symbol category over the internal language: evaluate a symbol
/// back to an element of the base category.
pub fn epsilon_c(world: &mut World, calc: &LambdaCalculus, sym: &Symbol) -> Result<ExprId> {
    let fv = world.free_vars(calc, sym.body);
    let bty = world.ty(sym.body);
    let top = world.top();
    let single_matching = fv.len() == 1 && fv[0] == sym.binder;
    if single_matching || fv.is_empty() || bty == top {
        // ε_x φ via the generic machinery over the free world.
        let mut ctx_vars = alloc::vec![sym.binder];
        let targets = alloc::vec![sym.binder.ty];
        let pctx = PolyCtx { targets };
        let mut ops = crate::poly::FreeCat { world };
        let poly = term_to_poly(&mut ops, &mut ctx_vars, sym.body)?;
        let mut pw = PolyWorld { ops: &mut ops, ctx: &pctx };
        let out = pw.epsilon(0, &poly)?;
        match out {
            Poly::Atom(a) => Ok(a),
            _ => Err(Error::Internal("epsilon left an indeterminate")),
        }
    } else {
        // The two-variable case: the symbol is a type edge.
        world.ent(sym.binder.ty, bty)
    }
}

/// ε for a symbol over an arbitrary syntactic calculus, valued in symbols.
pub fn epsilon_c_symbolic(
    world: &mut World,
    calc: &LambdaCalculus,
    sym: &Symbol,
) -> Result<Symbol> {
    let fv = world.free_vars(calc, sym.body);
    let bty = world.ty(sym.body);
    let top = world.top();
    let single_matching = fv.len() == 1 && fv[0] == sym.binder;
    if single_matching || fv.is_empty() || bty == top {
        let mut cat = SymbolCat { world, calc };
        let xt = cat.of_type(sym.binder.ty)?;
        let pctx = PolyCtx { targets: alloc::vec![xt] };
        let mut ctx_vars = alloc::vec![sym.binder];
        let poly = term_to_poly(&mut cat, &mut ctx_vars, sym.body)?;
        let mut pw = PolyWorld { ops: &mut cat, ctx: &pctx };
        let out = pw.epsilon(0, &poly)?;
        match out {
            Poly::Atom(a) => Ok(a),
            _ => Err(Error::Internal("epsilon left an indeterminate")),
        }
    } else {
        let mut cat = SymbolCat { world, calc };
        let a = cat.of_type(sym.binder.ty)?;
        let b = cat.of_type(bty)?;
        cat.ent(&a, &b)
    }
}

/// One failed round trip.
#[derive(Debug, Clone)]
pub struct TriangleFailure {
    pub kind: &'static str,
    pub item: String,
    pub got: String,
}

/// Report of `check_triangles`.
#[derive(Debug, Clone, Default)]
pub struct TriangleReport {
    pub types_checked: usize,
    pub terms_checked: usize,
    pub symbols_checked: usize,
    pub naturality_checked: usize,
    pub failures: Vec<TriangleFailure>,
}

impl TriangleReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Map a polynomial over symbols back through ε, atom-wise.
fn l_epsilon(
    world: &mut World,
    calc: &LambdaCalculus,
    p: &Poly<Symbol>,
) -> Result<Poly<ExprId>> {
    use alloc::boxed::Box as B;
    Ok(match p {
        Poly::Atom(s) => Poly::Atom(epsilon_c(world, calc, s)?),
        Poly::Indet(i) => Poly::Indet(*i),
        Poly::Comp(f, g) => Poly::Comp(
            B::new(l_epsilon(world, calc, f)?),
            B::new(l_epsilon(world, calc, g)?),
        ),
        Poly::Ent(f, g) => Poly::Ent(
            B::new(l_epsilon(world, calc, f)?),
            B::new(l_epsilon(world, calc, g)?),
        ),
        Poly::Wedge(f, g) => Poly::Wedge(
            B::new(l_epsilon(world, calc, f)?),
            B::new(l_epsilon(world, calc, g)?),
        ),
        Poly::Pair(f, g) => Poly::Pair(
            B::new(l_epsilon(world, calc, f)?),
            B::new(l_epsilon(world, calc, g)?),
        ),
        Poly::Star(f) => Poly::Star(B::new(l_epsilon(world, calc, f)?)),
    })
}

fn poly_to_expr_ctx(world: &mut World, names: &[NameId], p: &Poly<ExprId>) -> Result<ExprId> {
    match p {
        Poly::Atom(a) => Ok(*a),
        Poly::Indet(i) => world.indet_expr(names[*i]),
        Poly::Comp(f, g) => {
            let f = poly_to_expr_ctx(world, names, f)?;
            let g = poly_to_expr_ctx(world, names, g)?;
            world.comp(f, g)
        }
        Poly::Ent(f, g) => {
            let f = poly_to_expr_ctx(world, names, f)?;
            let g = poly_to_expr_ctx(world, names, g)?;
            world.ent(f, g)
        }
        Poly::Wedge(f, g) => {
            let f = poly_to_expr_ctx(world, names, f)?;
            let g = poly_to_expr_ctx(world, names, g)?;
            world.wedge(f, g)
        }
        Poly::Pair(f, g) => {
            let f = poly_to_expr_ctx(world, names, f)?;
            let g = poly_to_expr_ctx(world, names, g)?;
            world.pair(f, g)
        }
        Poly::Star(f) => {
            let f = poly_to_expr_ctx(world, names, f)?;
            world.star(f)
        }
    }
}

/// Verify the triangle identities on sampled items.
///
/// - types and terms of the internal language round-trip through `Lε ∘ η`;
/// - symbols of the symbol category round-trip through `ε_C ∘ Cη`;
/// - η is natural with respect to sampled calculus morphisms.
pub fn check_triangles(
    world: &mut World,
    calc: &LambdaCalculus,
    samples: usize,
    seed: u64,
) -> Result<TriangleReport> {
    let mut report = TriangleReport::default();
    let mut rng = KernelRng::seed_from_u64(seed);
    let gen = crate::correspond::Generators::collect(world)?;

    // (i) Types: Lε(η(A_f)) = A_f, exactly.
    for _ in 0..samples {
        let f = gen.random_expr(world, &mut rng, 6)?;
        report.types_checked += 1;
        let sym = eta_type(world, calc, f)?;
        let back = epsilon_c(world, calc, &sym)?;
        if back != f {
            report.failures.push(TriangleFailure {
                kind: "type",
                item: world.render(f),
                got: world.render(back),
            });
        }
    }

    // (ii) Terms: Lε(η(φ)) = φ up to the internal-language equality.
    let ctx_names = world.indet_names();
    for _ in 0..samples {
        let Some(phi) = gen.random_term_expr(world, &mut rng, 8)? else {
            continue;
        };
        report.terms_checked += 1;
        let ep = eta_term(world, calc, &ctx_names, phi)?;
        let back_poly = l_epsilon(world, calc, &ep)?;
        let back = poly_to_expr_ctx(world, &ctx_names, &back_poly)?;
        if !crate::iccc::equal(world, back, phi)? {
            report.failures.push(TriangleFailure {
                kind: "term",
                item: world.render(phi),
                got: world.render(back),
            });
        }
    }

    // (iii) Symbols: ε_CΛ(Cη_Λ(⟨x|s⟩)) = ⟨x|s⟩.
    for _ in 0..samples {
        let Some(sym) = gen.random_symbol(world, calc, &mut rng, 8)? else {
            continue;
        };
        report.symbols_checked += 1;
        let back = epsilon_c_symbolic(world, calc, &sym)?;
        if back != sym {
            report.failures.push(TriangleFailure {
                kind: "symbol",
                item: format!(
                    "<{}#{} | {}>",
                    world.render(sym.binder.ty),
                    sym.binder.depth,
                    render_term(world, sym.body)
                ),
                got: format!(
                    "<{}#{} | {}>",
                    world.render(back.binder.ty),
                    back.binder.depth,
                    render_term(world, back.body)
                ),
            });
        }
    }

    // (iv) Naturality of η: η(Φ(A)) = CΦ(η(A)) along sampled endomorphism
    // translations (generator permutations with matching boundaries).
    let swaps = boundary_preserving_swaps(world);
    for _ in 0..samples.min(64) {
        let f = gen.random_expr(world, &mut rng, 5)?;
        report.naturality_checked += 1;
        for phi in &swaps {
            let phi_f = apply_swap(world, phi, f)?;
            let lhs = eta_type(world, calc, phi_f)?;
            let eta_f = eta_type(world, calc, f)?;
            let rhs = functor_c_swap(world, calc, phi, &eta_f)?;
            if lhs != rhs {
                report.failures.push(TriangleFailure {
                    kind: "naturality",
                    item: world.render(f),
                    got: format!("eta image mismatch under a generator swap"),
                });
            }
        }
    }
    Ok(report)
}

/// Endomorphism translations available on this presentation: pairs of
/// distinct generators with identical boundaries, swapped.
fn boundary_preserving_swaps(world: &World) -> Vec<(NameId, NameId)> {
    let names = world.generator_names();
    let mut out = Vec::new();
    for (i, &a) in names.iter().enumerate() {
        for &b in &names[i + 1..] {
            if world.is_object_gen(a) || world.is_object_gen(b) {
                continue;
            }
            if world.gen_boundaries(a) == world.gen_boundaries(b)
                && world.is_declared_const(a) == world.is_declared_const(b)
            {
                out.push((a, b));
            }
        }
    }
    out
}

fn apply_swap(world: &mut World, swap: &(NameId, NameId), e: ExprId) -> Result<ExprId> {
    let walk = |w: &mut World, x: ExprId| apply_swap(w, swap, x);
    match world.node(e) {
        Expr::Gen(n) => {
            let m = if n == swap.0 {
                swap.1
            } else if n == swap.1 {
                swap.0
            } else {
                n
            };
            world.gen_expr(m)
        }
        Expr::Indet(_) | Expr::Top => Ok(e),
        Expr::Id(a) => {
            let a = walk(world, a)?;
            world.id(a)
        }
        Expr::Comp(f, g) => {
            let f = walk(world, f)?;
            let g = walk(world, g)?;
            world.comp(f, g)
        }
        Expr::Ent(a, b) => {
            let a = walk(world, a)?;
            let b = walk(world, b)?;
            world.ent(a, b)
        }
        Expr::Wedge(f, g) => {
            let f = walk(world, f)?;
            let g = walk(world, g)?;
            world.wedge(f, g)
        }
        Expr::Pair(f, g) => {
            let f = walk(world, f)?;
            let g = walk(world, g)?;
            world.pair(f, g)
        }
        Expr::Star(f) => {
            let f = walk(world, f)?;
            world.star(f)
        }
        Expr::Proj1(a, b) => {
            let a = walk(world, a)?;
            let b = walk(world, b)?;
            world.proj1(a, b)
        }
        Expr::Proj2(a, b) => {
            let a = walk(world, a)?;
            let b = walk(world, b)?;
            world.proj2(a, b)
        }
        Expr::Eval(a, b) => {
            let a = walk(world, a)?;
            let b = walk(world, b)?;
            world.eval(a, b)
        }
    }
}

fn apply_swap_term(world: &mut World, swap: &(NameId, NameId), t: TermId) -> Result<TermId> {
    match world.term_node(t) {
        Term::Var(ty, d) => {
            let ty = apply_swap(world, swap, ty)?;
            world.var_term(ty, d)
        }
        Term::StarT => Ok(world.star_term()),
        Term::NameOf(a) => {
            let a = apply_swap(world, swap, a)?;
            world.name_term(a)
        }
        Term::ConstT(_) => Ok(t),
        Term::Proj1T(u) => {
            let u = apply_swap_term(world, swap, u)?;
            world.proj1_term(u)
        }
        Term::Proj2T(u) => {
            let u = apply_swap_term(world, swap, u)?;
            world.proj2_term(u)
        }
        Term::PairT(u, v) => {
            let u = apply_swap_term(world, swap, u)?;
            let v = apply_swap_term(world, swap, v)?;
            world.pair_term(u, v)
        }
        Term::App(u, v) => {
            let u = apply_swap_term(world, swap, u)?;
            let v = apply_swap_term(world, swap, v)?;
            world.app_term(u, v)
        }
        Term::Lam(ty, d, b) => {
            let ty = apply_swap(world, swap, ty)?;
            let b = apply_swap_term(world, swap, b)?;
            world.lam_term(Var { ty, depth: d }, b)
        }
    }
}

fn functor_c_swap(
    world: &mut World,
    calc: &LambdaCalculus,
    swap: &(NameId, NameId),
    sym: &Symbol,
) -> Result<Symbol> {
    let bty = apply_swap(world, swap, sym.binder.ty)?;
    let body = apply_swap_term(world, swap, sym.body)?;
    canonical_symbol(world, calc, Var { ty: bty, depth: sym.binder.depth }, body)
}

/// Debug rendering of a term.
pub fn render_term(world: &World, t: TermId) -> String {
    match world.term_node(t) {
        Term::Var(ty, d) => format!("v({}, {d})", world.render(ty)),
        Term::StarT => "star".into(),
        Term::NameOf(a) => format!("name({})", world.render(a)),
        Term::ConstT(k) => world.name_str(k).into(),
        Term::Proj1T(u) => format!("pi({})", render_term(world, u)),
        Term::Proj2T(u) => format!("pi'({})", render_term(world, u)),
        Term::PairT(u, v) => {
            format!("<{}, {}>", render_term(world, u), render_term(world, v))
        }
        Term::App(u, v) => {
            format!("({} @ {})", render_term(world, u), render_term(world, v))
        }
        Term::Lam(ty, d, b) => {
            format!("\\v({}, {d}). {}", world.render(ty), render_term(world, b))
        }
    }
}

/// Deterministic well-formed generators for expressions, internal-language
/// terms, and symbols.
pub struct Generators {
    atoms: Vec<ExprId>,
    subjects: Vec<ExprId>,
}

impl Generators {
    pub fn collect(world: &mut World) -> Result<Generators> {
        let mut atoms = Vec::new();
        let mut subjects = BTreeSet::new();
        subjects.insert(world.top());
        for n in world.generator_names() {
            let e = world.gen_expr(n)?;
            atoms.push(e);
            subjects.insert(world.source(e));
            subjects.insert(world.target(e));
        }
        for n in world.indet_names() {
            if let Some(t) = world.indet_target(n) {
                subjects.insert(t);
            }
        }
        Ok(Generators { atoms, subjects: subjects.into_iter().collect() })
    }

    /// A random well-formed expression of roughly the requested size.
    pub fn random_expr(&self, world: &mut World, rng: &mut KernelRng, size: u32) -> Result<ExprId> {
        let mut pool: Vec<ExprId> = self.atoms.clone();
        pool.push(world.top());
        for &s in &self.subjects {
            pool.push(world.id(s)?);
        }
        if pool.is_empty() {
            return Ok(world.top());
        }
        let mut current = pool[rng.below(pool.len())];
        let mut budget = size;
        let mut guard = 0;
        while budget > 0 && guard < 200 {
            guard += 1;
            let pick = pool[rng.below(pool.len())];
            let choice = rng.below(7);
            let next = match choice {
                0 => world.comp(current, pick).ok(),
                1 => world.comp(pick, current).ok(),
                2 => world.pair(current, pick).ok(),
                3 => world.wedge(current, pick).ok(),
                4 => world.star(current).ok(),
                5 => world.ent(current, pick).ok(),
                _ => {
                    let a = world.source(current);
                    let b = self.subjects[rng.below(self.subjects.len())];
                    match rng.below(3) {
                        0 => world.proj1(a, b).ok(),
                        1 => world.proj2(a, b).ok(),
                        _ => world.eval(a, b).ok(),
                    }
                }
            };
            if let Some(n) = next {
                if world.size(n) <= size * 3 + 8 {
                    pool.push(n);
                    current = n;
                    budget = budget.saturating_sub(1);
                }
            }
        }
        Ok(current)
    }

    /// A random source-⊤ polynomial (internal-language term); `None` when
    /// the world has no indeterminates.
    pub fn random_term_expr(
        &self,
        world: &mut World,
        rng: &mut KernelRng,
        size: u32,
    ) -> Result<Option<ExprId>> {
        let indets = world.indet_names();
        if indets.is_empty() {
            return Ok(None);
        }
        let top = world.top();
        let mut pool: Vec<ExprId> = Vec::new();
        for &n in &indets {
            pool.push(world.indet_expr(n)?);
        }
        // Global elements: names of atoms.
        for &a in &self.atoms {
            pool.push(world.name_arrow(a)?);
        }
        pool.push(top);
        let mut current = pool[rng.below(pool.len())];
        let mut budget = size;
        let mut guard = 0;
        while budget > 0 && guard < 300 {
            guard += 1;
            let pick = pool[rng.below(pool.len())];
            let choice = rng.below(6);
            let next = match choice {
                // Application through ε: ⟨f, x⟩ then ε when typed.
                0 => {
                    let tf = world.target(current);
                    if let Expr::Ent(a, b) = world.node(tf) {
                        if world.target(pick) == a {
                            let p = world.pair(current, pick)?;
                            let e = world.eval(a, b)?;
                            world.comp(e, p).ok()
                        } else {
                            None
                        }
                    } else {
                        None
                    }
                }
                1 => world.pair(current, pick).ok(),
                2 => {
                    // Postcompose a random base arrow.
                    let f = self.atoms.get(rng.below(self.atoms.len().max(1))).copied();
                    match f {
                        Some(f) if world.source(f) == world.target(current) => {
                            world.comp(f, current).ok()
                        }
                        _ => None,
                    }
                }
                3 => {
                    // Project back out of a pair-typed element.
                    let t = world.target(current);
                    if let Expr::Wedge(a, b) = world.node(t) {
                        let p = if rng.chance(1, 2) {
                            world.proj1(a, b)?
                        } else {
                            world.proj2(a, b)?
                        };
                        world.comp(p, current).ok()
                    } else {
                        None
                    }
                }
                4 => {
                    // Abstract: λ via the star of a munged element.
                    let t = world.target(current);
                    let name = world.name_arrow(t)?;
                    let _ = name;
                    None
                }
                _ => world.pair(pick, current).ok(),
            };
            if let Some(n) = next {
                if world.source(n) == top && world.size(n) <= size * 4 + 12 {
                    pool.push(n);
                    current = n;
                    budget = budget.saturating_sub(1);
                }
            }
        }
        if world.source(current) == top {
            Ok(Some(current))
        } else {
            Ok(None)
        }
    }

    /// A random symbol over a syntactic calculus: a term with at most one
    /// free variable.
    pub fn random_symbol(
        &self,
        world: &mut World,
        calc: &LambdaCalculus,
        rng: &mut KernelRng,
        size: u32,
    ) -> Result<Option<Symbol>> {
        let tys: Vec<ExprId> = self.subjects.clone();
        if tys.is_empty() {
            return Ok(None);
        }
        let bty = tys[rng.below(tys.len())];
        let x = Var { ty: bty, depth: 1 };
        let body = self.random_term(world, rng, &[x], size)?;
        match body {
            Some(b) => Ok(Some(canonical_symbol(world, calc, x, b)?)),
            None => Ok(None),
        }
    }

    /// A random well-typed term over the world's type signature, with free
    /// variables drawn from `vars`.
    pub fn random_term(
        &self,
        world: &mut World,
        rng: &mut KernelRng,
        vars: &[Var],
        size: u32,
    ) -> Result<Option<TermId>> {
        let mut pool: Vec<TermId> = Vec::new();
        for v in vars {
            pool.push(world.var_term(v.ty, v.depth)?);
        }
        pool.push(world.star_term());
        for &a in &self.atoms {
            pool.push(world.name_term(a)?);
        }
        for &s in &self.subjects {
            let i = world.id(s)?;
            pool.push(world.name_term(i)?);
        }
        if pool.is_empty() {
            return Ok(None);
        }
        let mut current = pool[rng.below(pool.len())];
        let mut budget = size;
        let mut guard = 0;
        while budget > 0 && guard < 300 {
            guard += 1;
            let pick = pool[rng.below(pool.len())];
            let choice = rng.below(6);
            let next = match choice {
                0 => world.pair_term(current, pick).ok(),
                1 => world.app_term(current, pick).ok(),
                2 => world.proj1_term(current).ok(),
                3 => world.proj2_term(current).ok(),
                4 => {
                    // λ-abstract a fresh variable of a random subject type.
                    let ty = tys_pick(&self.subjects, rng);
                    let mut avoid = BTreeSet::new();
                    world.all_vars(current, &mut avoid);
                    let mut depth = 1;
                    while avoid.contains(&Var { ty, depth })
                        || vars.iter().any(|v| *v == Var { ty, depth })
                    {
                        depth += 1;
                    }
                    world.lam_term(Var { ty, depth }, current).ok()
                }
                _ => world.app_term(pick, current).ok(),
            };
            if let Some(n) = next {
                if world.term_size(n) <= size * 4 + 12 {
                    // Keep the free-variable count at most one.
                    if world.fv_raw(n).len() <= 1 {
                        pool.push(n);
                        current = n;
                    }
                    budget = budget.saturating_sub(1);
                }
            } else {
                budget = budget.saturating_sub(1);
            }
        }
        if world.fv_raw(current).len() <= 1 {
            Ok(Some(current))
        } else {
            Ok(None)
        }
    }
}

fn tys_pick(tys: &[ExprId], rng: &mut KernelRng) -> ExprId {
    tys[rng.below(tys.len())]
}
