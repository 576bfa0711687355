//! Line-oriented manifests.
//!
//! ```text
//! # comment
//! [context]
//! base = x, y
//! fiber = a1, a2          # name or name:degree, degree 1 by default
//! frame = e
//! connection(x, e, e) = expr
//!
//! [algebroid A]
//! anchor(a1, x) = 1
//! bracket(a1, a2, a1) = 1
//!
//! [commands]
//! verify algebroid A
//! ```

use std::fmt;
use std::sync::Arc;

use nqcalc_core::algebroid::AlgebroidData;
use nqcalc_core::classifiers::contact::JacobiPair;
use nqcalc_core::classifiers::dirac::DiracMorphism;
use nqcalc_core::classifiers::foliation::{FoliationData, QuotientConnection};
use nqcalc_core::classifiers::spencer_op::exterior_spencer_data;
use nqcalc_core::classifiers::MultivectorField;
use nqcalc_core::poly::{Bidegree, GradedPoly};
use nqcalc_core::spencer::{extract_spencer_auto, SpencerData};
use nqcalc_core::{GradedContext, Homogeneity, VectorValuedForm};

use crate::error::{ManifestError, Pos};
use crate::expr::parse_at;

type Res<T> = Result<T, ManifestError>;

pub enum Structure {
    Algebroid(AlgebroidData),
    Form(VectorValuedForm),
    Spencer { algebroid: Option<AlgebroidData>, data: SpencerData },
    Bivector(MultivectorField),
    Jacobi(JacobiPair),
    Dirac { algebroid: AlgebroidData, map: DiracMorphism },
    Foliation { algebroid: AlgebroidData, data: FoliationData },
    Lcs { phi: GradedPoly, omega: GradedPoly },
    LcPoisson { phi: GradedPoly, bivector: MultivectorField },
    Kplectic { algebroid: AlgebroidData, order: u32, ell: Vec<VectorValuedForm> },
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Algebroid(_) => "algebroid",
            Structure::Form(_) => "form",
            Structure::Spencer { .. } => "spencer",
            Structure::Bivector(_) => "bivector",
            Structure::Jacobi(_) => "jacobi",
            Structure::Dirac { .. } => "dirac",
            Structure::Foliation { .. } => "foliation",
            Structure::Lcs { .. } => "lcs",
            Structure::LcPoisson { .. } => "lcpoisson",
            Structure::Kplectic { .. } => "kplectic",
        }
    }
}

const KINDS: &[&str] =
    &["algebroid", "form", "spencer", "bivector", "jacobi", "dirac", "foliation", "lcs", "lcpoisson", "kplectic"];

pub struct Named {
    pub name: String,
    pub pos: Pos,
    pub structure: Structure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    VerifyAlgebroid(String),
    Compat { algebroid: String, form: String },
    Cartan(usize),
    Roundtrip(String),
    /// Runs the classifier matching the kind of the named structure.
    Classify(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Command {
    pub name: String,
    pub pos: Pos,
    pub action: Action,
}

pub struct Manifest {
    pub context: Arc<GradedContext>,
    /// The base coordinates alone, for structures living on `M`.
    pub base: Arc<GradedContext>,
    pub structures: Vec<Named>,
    pub commands: Vec<Command>,
}

impl fmt::Debug for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.structures.iter().map(|n| format!("{} {}", n.structure.kind(), n.name)).collect();
        f.debug_struct("Manifest")
            .field("generators", &self.context.generators().iter().map(|g| &g.name).collect::<Vec<_>>())
            .field("structures", &names)
            .field("commands", &self.commands)
            .finish()
    }
}

impl Manifest {
    pub fn get(&self, name: &str) -> Option<&Structure> {
        self.structures.iter().find(|n| n.name == name).map(|n| &n.structure)
    }
}

#[derive(Debug)]
struct Entry {
    key: String,
    args: Vec<(String, Pos)>,
    value: String,
    pos: Pos,
    vpos: Pos,
}

#[derive(Debug)]
struct Block {
    kind: String,
    name: Option<String>,
    pos: Pos,
    entries: Vec<Entry>,
    lines: Vec<(String, Pos)>,
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Column (one-based) of byte offset `at` in `line`.
fn col(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

fn parse_key(text: &str, line: &str, start: usize, lineno: usize) -> Res<(String, Vec<(String, Pos)>)> {
    let pos = Pos::new(lineno, col(line, start));
    let Some(open) = text.find('(') else {
        if !is_ident(text) {
            return Err(ManifestError::syntax(pos, format!("invalid key `{text}`")));
        }
        return Ok((text.to_string(), Vec::new()));
    };
    let name = text[..open].trim();
    if !is_ident(name) || !text.ends_with(')') {
        return Err(ManifestError::syntax(pos, format!("invalid key `{text}`")));
    }
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    let mut offset = start + open + 1;
    for raw in inner.split(',') {
        let lead = raw.len() - raw.trim_start().len();
        let arg = raw.trim();
        let apos = Pos::new(lineno, col(line, offset + lead));
        if !is_ident(arg) {
            return Err(ManifestError::syntax(apos, format!("invalid argument `{arg}`")));
        }
        args.push((arg.to_string(), apos));
        offset += raw.len() + 1;
    }
    Ok((name.to_string(), args))
}

fn split_blocks(text: &str) -> Res<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = line.len() - line.trim_start().len();
        let pos = Pos::new(lineno, col(line, start));
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(ManifestError::syntax(pos, "unterminated section header"));
            }
            let words: Vec<&str> = trimmed[1..trimmed.len() - 1].split_whitespace().collect();
            let (kind, name) = match words.as_slice() {
                [k] => (k.to_string(), None),
                [k, n] => (k.to_string(), Some(n.to_string())),
                _ => return Err(ManifestError::syntax(pos, "expected `[kind]` or `[kind name]`")),
            };
            let named = KINDS.contains(&kind.as_str());
            if !named && kind != "context" && kind != "commands" {
                return Err(ManifestError::syntax(pos, format!("unknown section `{kind}`")));
            }
            match (&name, named) {
                (None, true) => return Err(ManifestError::syntax(pos, format!("section `{kind}` needs a name"))),
                (Some(_), false) => return Err(ManifestError::syntax(pos, format!("section `{kind}` takes no name"))),
                (Some(n), true) if !is_ident(n) => {
                    return Err(ManifestError::syntax(pos, format!("invalid name `{n}`")))
                }
                _ => {}
            }
            blocks.push(Block { kind, name, pos, entries: Vec::new(), lines: Vec::new() });
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(ManifestError::syntax(pos, "entry outside of a section"));
        };
        if block.kind == "commands" {
            block.lines.push((trimmed.to_string(), pos));
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ManifestError::syntax(pos, "expected `key = value`"));
        };
        let key_text = line[..eq].trim();
        let (key, args) = parse_key(key_text, line, start, lineno)?;
        let after = &line[eq + 1..];
        let lead = after.len() - after.trim_start().len();
        let value = after.trim().to_string();
        let vpos = Pos::new(lineno, col(line, eq + 1 + lead));
        if value.is_empty() {
            return Err(ManifestError::syntax(vpos, "missing value"));
        }
        block.entries.push(Entry { key, args, value, pos, vpos });
    }
    Ok(blocks)
}

/// Comma separated identifiers with positions.
fn list(e: &Entry) -> Res<Vec<(String, Pos)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in e.value.split(',') {
        let lead = raw.len() - raw.trim_start().len();
        let item = raw.trim();
        let pos = e.vpos.shift(e.value[..offset + lead].chars().count());
        if item.is_empty() {
            return Err(ManifestError::syntax(pos, "empty list item"));
        }
        out.push((item.to_string(), pos));
        offset += raw.len() + 1;
    }
    Ok(out)
}

fn arity(e: &Entry, n: usize) -> Res<()> {
    if e.args.len() == n {
        Ok(())
    } else {
        Err(ManifestError::syntax(e.pos, format!("`{}` takes {n} argument(s), found {}", e.key, e.args.len())))
    }
}

fn unknown_key(e: &Entry, kind: &str) -> ManifestError {
    ManifestError::syntax(e.pos, format!("unknown key `{}` in {kind} section", e.key))
}

fn unresolved(name: &str, pos: Pos) -> ManifestError {
    ManifestError::UnresolvedReference { pos, name: name.to_string() }
}

fn base_arg(ctx: &GradedContext, (name, pos): &(String, Pos)) -> Res<usize> {
    ctx.base_position(name).map_err(|_| unresolved(name, *pos))
}

fn fiber_arg(ctx: &GradedContext, (name, pos): &(String, Pos)) -> Res<usize> {
    ctx.fiber_position(name).map_err(|_| unresolved(name, *pos))
}

fn frame_arg(ctx: &GradedContext, (name, pos): &(String, Pos)) -> Res<usize> {
    ctx.frame_index(name).map_err(|_| unresolved(name, *pos))
}

fn nat(e: &Entry) -> Res<u32> {
    e.value.parse().map_err(|_| ManifestError::syntax(e.vpos, format!("expected a natural number, found `{}`", e.value)))
}

fn value(e: &Entry, ctx: &Arc<GradedContext>) -> Res<GradedPoly> {
    parse_at(&e.value, e.vpos, ctx)
}

fn base_function(e: &Entry, ctx: &Arc<GradedContext>) -> Res<GradedPoly> {
    let p = value(e, ctx)?;
    if !p.is_base_function() {
        return Err(ManifestError::degree(e.vpos, format!("`{p}` is not a function on the base")));
    }
    Ok(p)
}

fn base_form(e: &Entry, ctx: &Arc<GradedContext>, k: u32) -> Res<GradedPoly> {
    let p = value(e, ctx)?;
    match p.bidegree() {
        Homogeneity::Zero => Ok(p),
        Homogeneity::Homogeneous(b) if b == Bidegree::new(k, 0) => Ok(p),
        _ => Err(ManifestError::degree(e.vpos, format!("`{p}` is not a {k}-form on the base"))),
    }
}

fn single<'a>(block: &'a Block, key: &str) -> Res<Option<&'a Entry>> {
    let mut found = block.entries.iter().filter(|e| e.key == key);
    let first = found.next();
    if let Some(dup) = found.next() {
        return Err(ManifestError::syntax(dup.pos, format!("duplicate key `{key}`")));
    }
    Ok(first)
}

fn required<'a>(block: &'a Block, key: &str) -> Res<&'a Entry> {
    single(block, key)?.ok_or_else(|| ManifestError::syntax(block.pos, format!("missing key `{key}`")))
}

struct Builder {
    ctx: Arc<GradedContext>,
    base: Arc<GradedContext>,
    structures: Vec<Named>,
}

impl Builder {
    fn lookup(&self, name: &str, pos: Pos) -> Res<&Structure> {
        self.structures.iter().find(|n| n.name == name).map(|n| &n.structure).ok_or_else(|| unresolved(name, pos))
    }

    fn algebroid_ref(&self, e: &Entry) -> Res<AlgebroidData> {
        match self.lookup(&e.value, e.vpos)? {
            Structure::Algebroid(a) => Ok(a.clone()),
            other => Err(ManifestError::syntax(e.vpos, format!("`{}` is a {}, expected an algebroid", e.value, other.kind()))),
        }
    }

    /// Form values `ell(a) = expr` or `ell(a, e) = expr`, one per frame
    /// element of `A`.
    fn ell_values(&self, block: &Block, k: Option<u32>) -> Res<Vec<VectorValuedForm>> {
        let ctx = &self.ctx;
        let rank = ctx.rank();
        let mut comps = vec![vec![GradedPoly::zero(ctx); rank]; ctx.num_fiber()];
        for e in block.entries.iter().filter(|e| e.key == "ell") {
            let a = fiber_arg(ctx, e.args.first().ok_or_else(|| ManifestError::syntax(e.pos, "`ell` needs a section"))?)?;
            let alpha = match e.args.len() {
                1 if rank == 1 => 0,
                1 => return Err(ManifestError::syntax(e.pos, "name the frame element: `ell(a, e)`")),
                2 => frame_arg(ctx, &e.args[1])?,
                _ => return Err(ManifestError::syntax(e.pos, "`ell` takes one or two arguments")),
            };
            comps[a][alpha] = match k {
                Some(k) => base_form(e, ctx, k)?,
                None => value(e, ctx)?,
            };
        }
        comps
            .into_iter()
            .map(|c| VectorValuedForm::new(ctx, c).map_err(|err| ManifestError::engine(block.pos, err)))
            .collect()
    }

    fn bivector_entries(&self, block: &Block, key: &str) -> Res<MultivectorField> {
        let base = &self.base;
        let mut entries = Vec::new();
        for e in block.entries.iter().filter(|e| e.key == key) {
            arity(e, 2)?;
            let (i, j) = (base_arg(base, &e.args[0])?, base_arg(base, &e.args[1])?);
            if i == j {
                return Err(ManifestError::syntax(e.pos, "a bivector entry needs two distinct coordinates"));
            }
            entries.push((i, j, base_function(e, base)?));
        }
        MultivectorField::bivector(base, &entries).map_err(|err| ManifestError::engine(block.pos, err))
    }

    fn check_keys(block: &Block, allowed: &[&str]) -> Res<()> {
        match block.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(unknown_key(e, &block.kind)),
            None => Ok(()),
        }
    }

    fn order(block: &Block) -> Res<u32> {
        let e = required(block, "order")?;
        match nat(e)? {
            0 => Err(ManifestError::degree(e.vpos, "order must be positive")),
            k => Ok(k),
        }
    }

    fn build(&self, block: &Block) -> Res<Structure> {
        let ctx = &self.ctx;
        let engine = |err| ManifestError::engine(block.pos, err);
        Ok(match block.kind.as_str() {
            "algebroid" => {
                Self::check_keys(block, &["preset", "anchor", "bracket", "theta"])?;
                let mut a = match single(block, "preset")? {
                    None => AlgebroidData::abelian(ctx).map_err(engine)?,
                    Some(e) => match e.value.as_str() {
                        "abelian" => AlgebroidData::abelian(ctx).map_err(engine)?,
                        "tangent" => AlgebroidData::tangent(ctx).map_err(engine)?,
                        other => return Err(ManifestError::syntax(e.vpos, format!("unknown preset `{other}`"))),
                    },
                };
                for e in &block.entries {
                    match e.key.as_str() {
                        "anchor" => {
                            arity(e, 2)?;
                            a.set_anchor(fiber_arg(ctx, &e.args[0])?, base_arg(ctx, &e.args[1])?, base_function(e, ctx)?);
                        }
                        "bracket" => {
                            arity(e, 3)?;
                            let (x, y, z) = (fiber_arg(ctx, &e.args[0])?, fiber_arg(ctx, &e.args[1])?, fiber_arg(ctx, &e.args[2])?);
                            if x == y {
                                return Err(ManifestError::syntax(e.pos, "a bracket entry needs two distinct sections"));
                            }
                            a.set_structure(x, y, z, base_function(e, ctx)?);
                        }
                        "theta" => {
                            arity(e, 3)?;
                            let (x, alpha, beta) = (fiber_arg(ctx, &e.args[0])?, frame_arg(ctx, &e.args[1])?, frame_arg(ctx, &e.args[2])?);
                            a.set_theta(x, beta, alpha, base_function(e, ctx)?);
                        }
                        _ => {}
                    }
                }
                Structure::Algebroid(a)
            }
            "form" => {
                Self::check_keys(block, &["value", "component"])?;
                let mut comps = vec![GradedPoly::zero(ctx); ctx.rank()];
                for e in &block.entries {
                    let alpha = match (e.key.as_str(), e.args.len()) {
                        ("value", 0) if ctx.rank() == 1 => 0,
                        ("value", 0) => return Err(ManifestError::syntax(e.pos, "name the frame element: `component(e)`")),
                        ("component", 1) => frame_arg(ctx, &e.args[0])?,
                        _ => return Err(ManifestError::syntax(e.pos, format!("malformed `{}` entry", e.key))),
                    };
                    comps[alpha] = value(e, ctx)?;
                }
                Structure::Form(VectorValuedForm::new(ctx, comps).map_err(engine)?)
            }
            "spencer" => {
                if let Some(e) = single(block, "form")? {
                    Self::check_keys(block, &["form"])?;
                    let w = match self.lookup(&e.value, e.vpos)? {
                        Structure::Form(w) => w,
                        other => {
                            return Err(ManifestError::syntax(e.vpos, format!("`{}` is a {}, expected a form", e.value, other.kind())))
                        }
                    };
                    let data = extract_spencer_auto(w).map_err(|err| ManifestError::engine(e.vpos, err))?;
                    Structure::Spencer { algebroid: None, data }
                } else {
                    Self::check_keys(block, &["algebroid", "order", "ell"])?;
                    let a = self.algebroid_ref(required(block, "algebroid")?)?;
                    let k = Self::order(block)?;
                    let ell = self.ell_values(block, Some(k - 1))?;
                    let data = exterior_spencer_data(ctx, k, &ell).map_err(engine)?;
                    Structure::Spencer { algebroid: Some(a), data }
                }
            }
            "kplectic" => {
                Self::check_keys(block, &["algebroid", "order", "ell"])?;
                let algebroid = self.algebroid_ref(required(block, "algebroid")?)?;
                let order = Self::order(block)?;
                let ell = self.ell_values(block, Some(order))?;
                Structure::Kplectic { algebroid, order, ell }
            }
            "dirac" => {
                if let Some(e) = single(block, "bivector")? {
                    Self::check_keys(block, &["bivector"])?;
                    let p = match self.lookup(&e.value, e.vpos)? {
                        Structure::Bivector(p) => p,
                        other => {
                            return Err(ManifestError::syntax(e.vpos, format!("`{}` is a {}, expected a bivector", e.value, other.kind())))
                        }
                    };
                    let (algebroid, map) = DiracMorphism::poisson_graph(p).map_err(engine)?;
                    Structure::Dirac { algebroid, map }
                } else {
                    Self::check_keys(block, &["algebroid", "ell"])?;
                    let algebroid = self.algebroid_ref(required(block, "algebroid")?)?;
                    let ell = self.ell_values(block, Some(1))?;
                    let map = DiracMorphism::from_algebroid(&algebroid, &ell).map_err(engine)?;
                    Structure::Dirac { algebroid, map }
                }
            }
            "foliation" => {
                Self::check_keys(block, &["algebroid", "span", "row", "nabla", "quotient"])?;
                let algebroid = self.algebroid_ref(required(block, "algebroid")?)?;
                let mut data = match single(block, "span")? {
                    Some(e) => {
                        let idx = list(e)?.iter().map(|a| fiber_arg(ctx, a)).collect::<Res<Vec<_>>>()?;
                        FoliationData::coordinate(ctx, &idx)
                    }
                    None => {
                        let mut labels: Vec<String> = Vec::new();
                        let mut rows: Vec<Vec<GradedPoly>> = Vec::new();
                        for e in block.entries.iter().filter(|e| e.key == "row") {
                            arity(e, 2)?;
                            let r = match labels.iter().position(|l| *l == e.args[0].0) {
                                Some(r) => r,
                                None => {
                                    labels.push(e.args[0].0.clone());
                                    rows.push(vec![GradedPoly::zero(ctx); ctx.num_fiber()]);
                                    rows.len() - 1
                                }
                            };
                            rows[r][fiber_arg(ctx, &e.args[1])?] = base_function(e, ctx)?;
                        }
                        FoliationData::trivial(ctx, rows)
                    }
                };
                for e in block.entries.iter().filter(|e| e.key == "nabla") {
                    arity(e, 3)?;
                    let (i, c, c2) = (base_arg(ctx, &e.args[0])?, frame_arg(ctx, &e.args[1])?, frame_arg(ctx, &e.args[2])?);
                    data.connection[i][c2][c] = base_function(e, ctx)?;
                }
                if let Some(e) = single(block, "quotient")? {
                    data.quotient = match e.value.as_str() {
                        "derived" => QuotientConnection::Derived,
                        "explicit" => QuotientConnection::Explicit,
                        other => return Err(ManifestError::syntax(e.vpos, format!("unknown quotient connection `{other}`"))),
                    };
                }
                Structure::Foliation { algebroid, data }
            }
            "bivector" => {
                Self::check_keys(block, &["entry"])?;
                Structure::Bivector(self.bivector_entries(block, "entry")?)
            }
            "jacobi" => {
                Self::check_keys(block, &["lambda", "reeb"])?;
                let base = &self.base;
                let lambda = self.bivector_entries(block, "lambda")?;
                let mut comps = vec![GradedPoly::zero(base); base.num_base()];
                for e in block.entries.iter().filter(|e| e.key == "reeb") {
                    arity(e, 1)?;
                    comps[base_arg(base, &e.args[0])?] = base_function(e, base)?;
                }
                let reeb = MultivectorField::vector(base, &comps).map_err(engine)?;
                Structure::Jacobi(JacobiPair::new(lambda, reeb).map_err(engine)?)
            }
            "lcs" => {
                Self::check_keys(block, &["phi", "omega"])?;
                let phi = base_form(required(block, "phi")?, &self.base, 1)?;
                let omega = base_form(required(block, "omega")?, &self.base, 2)?;
                Structure::Lcs { phi, omega }
            }
            "lcpoisson" => {
                Self::check_keys(block, &["phi", "entry"])?;
                let phi = base_form(required(block, "phi")?, &self.base, 1)?;
                Structure::LcPoisson { phi, bivector: self.bivector_entries(block, "entry")? }
            }
            other => unreachable!("section kind {other}"),
        })
    }
}

fn build_context(block: &Block) -> Res<Arc<GradedContext>> {
    let mut b = GradedContext::builder();
    for e in &block.entries {
        match e.key.as_str() {
            "base" => {
                arity(e, 0)?;
                for (x, pos) in list(e)? {
                    if !is_ident(&x) || x == "d" {
                        return Err(ManifestError::syntax(pos, format!("invalid coordinate name `{x}`")));
                    }
                    b = b.base(x);
                }
            }
            "fiber" => {
                arity(e, 0)?;
                for (item, pos) in list(e)? {
                    let (name, deg) = match item.split_once(':') {
                        Some((n, d)) => {
                            let deg = d.trim().parse().map_err(|_| ManifestError::syntax(pos, format!("invalid degree in `{item}`")))?;
                            (n.trim().to_string(), deg)
                        }
                        None => (item.clone(), 1),
                    };
                    if !is_ident(&name) || name == "d" {
                        return Err(ManifestError::syntax(pos, format!("invalid coordinate name `{name}`")));
                    }
                    if deg == 0 {
                        return Err(ManifestError::degree(pos, format!("fiber coordinate `{name}` needs positive degree")));
                    }
                    b = b.fiber(name, deg);
                }
            }
            "frame" => {
                arity(e, 0)?;
                for (name, pos) in list(e)? {
                    if !is_ident(&name) {
                        return Err(ManifestError::syntax(pos, format!("invalid frame name `{name}`")));
                    }
                    b = b.frame(name);
                }
            }
            "connection" => arity(e, 3)?,
            _ => return Err(unknown_key(e, "context")),
        }
    }
    let ctx = b.build().map_err(|err| ManifestError::engine(block.pos, err))?;
    let mut conn = Vec::new();
    let mut first = None;
    for e in block.entries.iter().filter(|e| e.key == "connection") {
        base_arg(&ctx, &e.args[0])?;
        frame_arg(&ctx, &e.args[1])?;
        frame_arg(&ctx, &e.args[2])?;
        first.get_or_insert(e.pos);
        conn.push((e.args[0].0.clone(), e.args[1].0.clone(), e.args[2].0.clone(), base_function(e, &ctx)?));
    }
    match first {
        None => Ok(ctx),
        Some(pos) => ctx.with_connection(&conn).map_err(|err| ManifestError::engine(pos, err)),
    }
}

fn command(line: &str, pos: Pos, b: &Builder) -> Res<Command> {
    let (name, body, offset) = match line.split_once('=') {
        Some((label, rest)) => {
            let label = label.trim();
            if label.is_empty() {
                return Err(ManifestError::syntax(pos, "empty command label"));
            }
            (label.to_string(), rest, line.len() - rest.len())
        }
        None => (line.split_whitespace().collect::<Vec<_>>().join(" "), line, 0),
    };
    let mut words = Vec::new();
    let mut at = offset;
    for w in body.split_whitespace() {
        let idx = line[at..].find(w).expect("word in line") + at;
        words.push((w, pos.shift(line[..idx].chars().count())));
        at = idx + w.len();
    }
    let get = |i: usize| -> Res<(&str, Pos)> {
        words.get(i).copied().ok_or_else(|| ManifestError::syntax(pos, format!("incomplete command `{}`", body.trim())))
    };
    let resolve = |i: usize, kinds: &[&str]| -> Res<String> {
        let (w, p) = get(i)?;
        let s = b.lookup(w, p)?;
        if !kinds.is_empty() && !kinds.contains(&s.kind()) {
            return Err(ManifestError::syntax(p, format!("`{w}` is a {}, expected {}", s.kind(), kinds.join(" or "))));
        }
        Ok(w.to_string())
    };
    let (verb, vpos) = get(0)?;
    let (action, used) = match verb {
        "verify" => {
            let (what, wpos) = get(1)?;
            match what {
                "algebroid" => (Action::VerifyAlgebroid(resolve(2, &["algebroid"])?), 3),
                "compat" if words.len() == 3 => (Action::Classify(resolve(2, &["bivector"])?), 3),
                "compat" => (Action::Compat { algebroid: resolve(2, &["algebroid"])?, form: resolve(3, &["form"])? }, 4),
                "cartan" => {
                    let (n, npos) = get(2)?;
                    let n = n.parse().map_err(|_| ManifestError::syntax(npos, format!("expected an instance count, found `{n}`")))?;
                    (Action::Cartan(n), 3)
                }
                _ => return Err(ManifestError::syntax(wpos, format!("unknown verify target `{what}`"))),
            }
        }
        "roundtrip" => (Action::Roundtrip(resolve(1, &["form", "spencer"])?), 2),
        "classify" => {
            let (what, wpos) = get(1)?;
            let kinds: &[&str] = match what {
                "form" => {
                    let action = Action::Compat { algebroid: resolve(2, &["algebroid"])?, form: resolve(3, &["form"])? };
                    return finish(name, pos, action, &words, 4);
                }
                "poisson" => &["bivector"],
                "contact" => &["jacobi"],
                "algebroid" | "dirac" | "foliation" | "lcs" | "lcpoisson" | "spencer" | "kplectic" => {
                    std::slice::from_ref(KINDS.iter().find(|k| **k == what).expect("kind"))
                }
                _ => return Err(ManifestError::syntax(wpos, format!("unknown classifier `{what}`"))),
            };
            (Action::Classify(resolve(2, kinds)?), 3)
        }
        _ => return Err(ManifestError::syntax(vpos, format!("unknown command `{verb}`"))),
    };
    finish(name, pos, action, &words, used)
}

fn finish(name: String, pos: Pos, action: Action, words: &[(&str, Pos)], used: usize) -> Res<Command> {
    if let Some((w, p)) = words.get(used) {
        return Err(ManifestError::syntax(*p, format!("unexpected `{w}`")));
    }
    Ok(Command { name, pos, action })
}

pub fn parse_manifest(text: &str) -> Res<Manifest> {
    let blocks = split_blocks(text)?;
    let mut contexts = blocks.iter().filter(|b| b.kind == "context");
    let cblock = contexts.next().ok_or_else(|| ManifestError::syntax(Pos::new(1, 1), "missing [context] section"))?;
    if let Some(dup) = contexts.next() {
        return Err(ManifestError::syntax(dup.pos, "duplicate [context] section"));
    }
    let ctx = build_context(cblock)?;
    let base = GradedContext::builder()
        .bases(ctx.base_names().iter().cloned())
        .build()
        .map_err(|err| ManifestError::engine(cblock.pos, err))?;
    let mut b = Builder { ctx, base, structures: Vec::new() };
    let mut command_lines = Vec::new();
    for block in &blocks {
        match block.kind.as_str() {
            "context" => {}
            "commands" => command_lines.extend(block.lines.iter().cloned()),
            _ => {
                let name = block.name.clone().expect("named section");
                if b.structures.iter().any(|n| n.name == name) {
                    return Err(ManifestError::syntax(block.pos, format!("duplicate name `{name}`")));
                }
                let structure = b.build(block)?;
                b.structures.push(Named { name, pos: block.pos, structure });
            }
        }
    }
    let mut commands: Vec<Command> = Vec::new();
    for (line, pos) in &command_lines {
        let c = command(line, *pos, &b)?;
        if commands.iter().any(|o| o.name == c.name) {
            return Err(ManifestError::syntax(*pos, format!("duplicate command name `{}`", c.name)));
        }
        commands.push(c);
    }
    Ok(Manifest { context: b.ctx, base: b.base, structures: b.structures, commands })
}
