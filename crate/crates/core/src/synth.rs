//! Seeded generator of Processing-style sketches and plagiarized copies.
//!
//! Originals share an instructor starter template (`setup`/`draw` skeleton)
//! and add their own functions, statements and comments. Copies are an
//! original run through a number of disguise mutations. Everything derives
//! from the config seed.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::corpus::{Corpus, LabelSet};
use crate::error::{Error, Result};
use crate::forest::Label;
use crate::lexer::{is_keyword, SourceFile};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationOp {
    RenameIdentifiers,
    InsertComments,
    DeleteComments,
    ReorderFunctions,
    PerturbLiterals,
}

impl MutationOp {
    pub const ALL: [MutationOp; 5] = [
        MutationOp::RenameIdentifiers,
        MutationOp::InsertComments,
        MutationOp::DeleteComments,
        MutationOp::ReorderFunctions,
        MutationOp::PerturbLiterals,
    ];

    /// Parses the CLI spellings `rename`, `comments` (insert and delete),
    /// `reorder`, `literals` and `all`, comma separated.
    pub fn parse_list(s: &str) -> std::result::Result<Vec<MutationOp>, String> {
        let mut ops = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => ops.extend(MutationOp::ALL),
                "comments" => ops.extend([MutationOp::InsertComments, MutationOp::DeleteComments]),
                other => ops.push(other.parse()?),
            }
        }
        ops.sort();
        ops.dedup();
        Ok(ops)
    }
}

impl FromStr for MutationOp {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "rename" => MutationOp::RenameIdentifiers,
            "insert-comments" => MutationOp::InsertComments,
            "delete-comments" => MutationOp::DeleteComments,
            "reorder" => MutationOp::ReorderFunctions,
            "literals" => MutationOp::PerturbLiterals,
            other => return Err(format!("unknown mutation `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticConfig {
    pub num_originals: usize,
    pub num_plagiarized: usize,
    pub mutation_ops: Vec<MutationOp>,
    pub mutations_per_copy: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_originals: 60,
            num_plagiarized: 40,
            mutation_ops: MutationOp::ALL.to_vec(),
            mutations_per_copy: 3,
            seed: 7,
        }
    }
}

/// Generated corpus plus bookkeeping about which copy came from where.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub labels: LabelSet,
    /// `(copy_id, origin_id)` for every plagiarized file.
    pub provenance: Vec<(String, String)>,
}

// ---------------------------------------------------------------------------
// Program model

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Float,
    Boolean,
}

impl Ty {
    fn as_str(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Float => "float",
            Ty::Boolean => "boolean",
        }
    }
}

/// Identifier: user names index into `Program::names`; API names are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Name {
    User(usize),
    Api(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
enum Lit {
    Int(i64),
    Float(f64),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Var(Name),
    Lit(Lit),
    Bool(bool),
    Str(String),
    Bin(Box<Expr>, &'static str, Box<Expr>),
    Neg(Box<Expr>),
    Call(Name, Vec<Expr>),
    Paren(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Stmt {
    Decl(Ty, Name, Expr),
    Assign(Name, &'static str, Expr),
    Incr(Name, &'static str),
    Call(Name, Vec<Expr>),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    For(Name, Expr, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    Return(Expr),
    Comment(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Function {
    doc: Option<String>,
    ret: Option<Ty>,
    name: Name,
    params: Vec<(Ty, Name)>,
    body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
struct Global {
    comment: Option<String>,
    ty: Ty,
    name: Name,
    init: Expr,
}

#[derive(Debug, Clone, PartialEq)]
struct Program {
    header: Option<String>,
    names: Vec<String>,
    globals: Vec<Global>,
    functions: Vec<Function>,
}

// ---------------------------------------------------------------------------
// Vocabulary

const WORDS: &[&str] = &[
    "ball", "balle", "paddle", "raquette", "score", "vitesse", "speed", "position", "pos",
    "largeur", "hauteur", "width", "size", "taille", "couleur", "color", "rayon", "radius",
    "angle", "direction", "compteur", "counter", "niveau", "level", "vie", "lives", "joueur",
    "player", "ennemi", "enemy", "étoile", "star", "fenêtre", "bord", "edge", "temps", "timer",
    "délai", "delta", "gravité", "gravity", "rebond", "bounce", "cible", "target", "brique",
    "brick", "grille", "grid", "cellule", "cell", "pas", "step", "total", "somme", "moyenne",
    "index", "rangée", "row", "colonne", "col", "forme", "shape", "écran", "screen", "élan",
];

const SUFFIXES: &[&str] = &["", "X", "Y", "Max", "Min", "Actuel", "Next", "Prev", "Init", "2", "Count"];

const ENGLISH_COMMENTS: &[&str] = &[
    "update the position",
    "check if the ball hits the wall",
    "draw the player",
    "reset the game state",
    "compute the next step",
    "keep the score on screen",
    "move the paddle with the mouse",
    "handle collisions",
    "helper for the main loop",
    "TODO clean this up",
    "increase difficulty over time",
    "bounce back when hitting an edge",
];

const FRENCH_COMMENTS: &[&str] = &[
    "met à jour la position",
    "vérifie si la balle touche le mur",
    "dessine le joueur",
    "réinitialise le jeu",
    "calcule la prochaine étape",
    "affiche le score à l'écran",
    "déplace la raquette avec la souris",
    "gère les collisions",
    "fonction d'aide pour la boucle principale",
    "augmente la difficulté avec le temps",
    "rebondit quand on touche un bord",
    "à corriger plus tard",
];

const DRAW_CALLS: &[(&str, usize)] = &[
    ("ellipse", 4),
    ("rect", 4),
    ("line", 4),
    ("fill", 3),
    ("stroke", 3),
    ("triangle", 6),
    ("point", 2),
    ("strokeWeight", 1),
];

const MATH_CALLS: &[(&str, usize)] = &[
    ("random", 2),
    ("abs", 1),
    ("sqrt", 1),
    ("max", 2),
    ("min", 2),
    ("sin", 1),
    ("cos", 1),
    ("dist", 4),
    ("constrain", 3),
    ("map", 5),
];

const API_VARS: &[&str] = &["width", "height", "mouseX", "mouseY", "frameCount", "PI"];
const ARITH: &[&str] = &["+", "-", "*", "/", "%"];
const COMPARE: &[&str] = &["<", ">", "<=", ">=", "==", "!="];
const LOGIC: &[&str] = &["&&", "||"];
const COMPOUND: &[&str] = &["=", "+=", "-=", "*="];

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn comment_text(rng: &mut SplitMix64) -> String {
    let pool = if rng.chance(0.5) { ENGLISH_COMMENTS } else { FRENCH_COMMENTS };
    rng.pick(pool).to_string()
}

/// Fresh camelCase identifiers not colliding with `taken` or keywords.
fn fresh_names(rng: &mut SplitMix64, count: usize, taken: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        let mut name = rng.pick(WORDS).to_string();
        if rng.chance(0.7) {
            name.push_str(&capitalize(rng.pick(WORDS)));
        }
        name.push_str(rng.pick(SUFFIXES));
        if attempts > 50 * (count + 1) {
            let _ = write!(name, "{}", attempts);
        }
        if is_keyword(&name) || API_VARS.contains(&name.as_str()) || !taken.insert(name.clone()) {
            continue;
        }
        out.push(name);
    }
    out
}

// ---------------------------------------------------------------------------
// Generation

struct Gen<'r> {
    rng: &'r mut SplitMix64,
    names: Vec<String>,
    taken: HashSet<String>,
    /// Numeric variables visible everywhere (globals).
    globals: Vec<Name>,
}

impl<'r> Gen<'r> {
    fn new_name(&mut self) -> Name {
        let n = fresh_names(self.rng, 1, &mut self.taken).remove(0);
        self.names.push(n);
        Name::User(self.names.len() - 1)
    }

    fn literal(&mut self, ty: Ty) -> Expr {
        match ty {
            Ty::Int => Expr::Lit(Lit::Int(self.rng.range_inclusive(0, 400) as i64)),
            Ty::Float => Expr::Lit(Lit::Float(self.rng.range_inclusive(1, 400) as f64 / 4.0)),
            Ty::Boolean => Expr::Bool(self.rng.chance(0.5)),
        }
    }

    fn var(&mut self, locals: &[Name]) -> Expr {
        let r = self.rng.below(10);
        if r < 2 {
            Expr::Var(Name::Api(self.rng.pick(API_VARS)))
        } else if r < 6 && !locals.is_empty() {
            Expr::Var(*self.rng.pick(locals))
        } else if !self.globals.is_empty() {
            Expr::Var(*self.rng.pick(&self.globals))
        } else {
            Expr::Var(Name::Api(self.rng.pick(API_VARS)))
        }
    }

    fn numeric(&mut self, locals: &[Name], depth: usize) -> Expr {
        let r = self.rng.below(12);
        if depth == 0 || r < 4 {
            return if r.is_multiple_of(2) {
                self.var(locals)
            } else {
                let ty = if self.rng.chance(0.5) { Ty::Int } else { Ty::Float };
                self.literal(ty)
            };
        }
        match r {
            4..=7 => {
                let l = self.numeric(locals, depth - 1);
                let op = *self.rng.pick(ARITH);
                let rhs = self.numeric(locals, depth - 1);
                Expr::Bin(Box::new(l), op, Box::new(rhs))
            }
            8 => Expr::Paren(Box::new(self.numeric(locals, depth - 1))),
            9 => Expr::Neg(Box::new(self.var(locals))),
            _ => {
                let (f, arity) = *self.rng.pick(MATH_CALLS);
                let args = (0..arity).map(|_| self.numeric(locals, depth - 1)).collect();
                Expr::Call(Name::Api(f), args)
            }
        }
    }

    fn condition(&mut self, locals: &[Name]) -> Expr {
        let cmp = |g: &mut Self| {
            let l = g.numeric(locals, 1);
            let op = *g.rng.pick(COMPARE);
            let r = g.numeric(locals, 1);
            Expr::Bin(Box::new(l), op, Box::new(r))
        };
        if self.rng.chance(0.3) {
            let a = cmp(self);
            let op = *self.rng.pick(LOGIC);
            let b = cmp(self);
            Expr::Bin(Box::new(a), op, Box::new(b))
        } else {
            cmp(self)
        }
    }

    fn block(&mut self, locals: &mut Vec<Name>, len: usize, depth: usize) -> Vec<Stmt> {
        (0..len).map(|_| self.stmt(locals, depth)).collect()
    }

    fn stmt(&mut self, locals: &mut Vec<Name>, depth: usize) -> Stmt {
        let r = self.rng.below(if depth == 0 { 7 } else { 11 });
        match r {
            0 | 1 => {
                let ty = if self.rng.chance(0.5) { Ty::Int } else { Ty::Float };
                let init = self.numeric(locals, 2);
                let name = self.new_name();
                locals.push(name);
                Stmt::Decl(ty, name, init)
            }
            2 | 3 => {
                let target = match self.var(locals) {
                    Expr::Var(Name::User(u)) => Name::User(u),
                    _ => self.globals.first().copied().unwrap_or(Name::Api("strokeWeight")),
                };
                if matches!(target, Name::Api(_)) {
                    return self.draw_call(locals);
                }
                if self.rng.chance(0.25) {
                    Stmt::Incr(target, if self.rng.chance(0.5) { "++" } else { "--" })
                } else {
                    let op = *self.rng.pick(COMPOUND);
                    Stmt::Assign(target, op, self.numeric(locals, 2))
                }
            }
            4 | 5 => self.draw_call(locals),
            6 => {
                if self.rng.chance(0.5) {
                    let label = self.rng.pick(&["Score: ", "Niveau ", "x = ", "Vies : ", "Game over"]);
                    Stmt::Call(
                        Name::Api("text"),
                        vec![
                            Expr::Bin(Box::new(Expr::Str(label.to_string())), "+", Box::new(self.var(locals))),
                            self.literal(Ty::Int),
                            self.literal(Ty::Int),
                        ],
                    )
                } else {
                    Stmt::Call(Name::Api("println"), vec![self.var(locals)])
                }
            }
            7 | 8 => {
                let cond = self.condition(locals);
                let mut inner = locals.clone();
                let then_len = self.rng.range_inclusive(1, 3);
                let then = self.block(&mut inner, then_len, depth - 1);
                let otherwise = if self.rng.chance(0.4) {
                    let mut inner = locals.clone();
                    let n = self.rng.range_inclusive(1, 2);
                    Some(self.block(&mut inner, n, depth - 1))
                } else {
                    None
                };
                Stmt::If(cond, then, otherwise)
            }
            9 => {
                let counter = self.new_name();
                let bound = self.numeric(locals, 1);
                let mut inner = locals.clone();
                inner.push(counter);
                let n = self.rng.range_inclusive(1, 3);
                Stmt::For(counter, bound, self.block(&mut inner, n, depth - 1))
            }
            _ => {
                let cond = self.condition(locals);
                let mut inner = locals.clone();
                let n = self.rng.range_inclusive(1, 3);
                Stmt::While(cond, self.block(&mut inner, n, depth - 1))
            }
        }
    }

    fn draw_call(&mut self, locals: &[Name]) -> Stmt {
        let (f, arity) = *self.rng.pick(DRAW_CALLS);
        let args = (0..arity).map(|_| self.numeric(locals, 1)).collect();
        Stmt::Call(Name::Api(f), args)
    }

    fn maybe_comment(&mut self, p: f64) -> Option<String> {
        self.rng.chance(p).then(|| comment_text(self.rng))
    }

    fn function(&mut self) -> Function {
        let name = self.new_name();
        let nparams = self.rng.below(3);
        let params: Vec<(Ty, Name)> = (0..nparams)
            .map(|_| {
                let ty = if self.rng.chance(0.5) { Ty::Int } else { Ty::Float };
                (ty, self.new_name())
            })
            .collect();
        let mut locals: Vec<Name> = params.iter().map(|p| p.1).collect();
        let len = self.rng.range_inclusive(3, 7);
        let mut body = Vec::with_capacity(len + 2);
        for _ in 0..len {
            if let Some(c) = self.maybe_comment(0.15) {
                body.push(Stmt::Comment(c));
            }
            body.push(self.stmt(&mut locals, 2));
        }
        let ret = match self.rng.below(3) {
            0 => {
                body.push(Stmt::Return(self.numeric(&locals, 2)));
                Some(Ty::Float)
            }
            _ => None,
        };
        Function {
            doc: self.maybe_comment(0.6),
            ret,
            name,
            params,
            body,
        }
    }
}

/// The instructor's starter sketch.
fn template_program() -> Program {
    let names = vec!["ballX".into(), "ballY".into(), "ballSpeed".into()];
    let u = Name::User;
    let int = |v| Expr::Lit(Lit::Int(v));
    Program {
        header: Some("Starter code / code de départ : bouncing ball".into()),
        globals: vec![
            Global { comment: None, ty: Ty::Float, name: u(0), init: int(200) },
            Global { comment: None, ty: Ty::Float, name: u(1), init: int(200) },
            Global { comment: Some("pixels per frame".into()), ty: Ty::Float, name: u(2), init: Expr::Lit(Lit::Float(2.5)) },
        ],
        names,
        functions: vec![
            Function {
                doc: Some("runs once".into()),
                ret: None,
                name: Name::Api("setup"),
                params: vec![],
                body: vec![
                    Stmt::Call(Name::Api("size"), vec![int(400), int(400)]),
                    Stmt::Call(Name::Api("background"), vec![int(0)]),
                    Stmt::Call(Name::Api("noStroke"), vec![]),
                ],
            },
            Function {
                doc: Some("runs every frame".into()),
                ret: None,
                name: Name::Api("draw"),
                params: vec![],
                body: vec![
                    Stmt::Call(Name::Api("background"), vec![int(0)]),
                    Stmt::Call(Name::Api("fill"), vec![int(255), int(255), int(255)]),
                    Stmt::Call(
                        Name::Api("ellipse"),
                        vec![Expr::Var(u(0)), Expr::Var(u(1)), int(20), int(20)],
                    ),
                    Stmt::Assign(u(0), "+=", Expr::Var(u(2))),
                ],
            },
        ],
    }
}

fn generate_original(rng: &mut SplitMix64) -> Program {
    let mut base = template_program();
    let mut gen = Gen {
        rng,
        taken: base.names.iter().cloned().collect(),
        names: std::mem::take(&mut base.names),
        globals: vec![Name::User(0), Name::User(1), Name::User(2)],
    };

    let extra_globals = gen.rng.range_inclusive(2, 5);
    for _ in 0..extra_globals {
        let ty = if gen.rng.chance(0.2) {
            Ty::Boolean
        } else if gen.rng.chance(0.5) {
            Ty::Int
        } else {
            Ty::Float
        };
        let name = gen.new_name();
        let init = gen.literal(ty);
        let comment = gen.maybe_comment(0.3);
        base.globals.push(Global { comment, ty, name, init });
        if ty != Ty::Boolean {
            gen.globals.push(name);
        }
    }

    let nfuncs = gen.rng.range_inclusive(3, 6);
    let student: Vec<Function> = (0..nfuncs).map(|_| gen.function()).collect();

    // Student code inside the template's setup/draw.
    for f in 0..2 {
        let extra = gen.rng.range_inclusive(1, 3);
        let mut locals = Vec::new();
        for _ in 0..extra {
            let s = gen.stmt(&mut locals, 1);
            base.functions[f].body.push(s);
        }
        // Call some of the student's own functions from draw.
        if f == 1 {
            for func in &student {
                if gen.rng.chance(0.7) {
                    let args = func.params.iter().map(|_| gen.numeric(&[], 1)).collect();
                    base.functions[1].body.push(Stmt::Call(func.name, args));
                }
            }
        }
    }
    if gen.rng.chance(0.5) {
        base.header = Some(comment_text(gen.rng));
    }
    base.functions.extend(student);
    base.names = gen.names;
    base
}

// ---------------------------------------------------------------------------
// Mutations

fn for_each_block(stmts: &mut Vec<Stmt>, f: &mut impl FnMut(&mut Vec<Stmt>)) {
    f(stmts);
    for s in stmts.iter_mut() {
        match s {
            Stmt::If(_, then, otherwise) => {
                for_each_block(then, f);
                if let Some(o) = otherwise {
                    for_each_block(o, f);
                }
            }
            Stmt::For(_, _, body) | Stmt::While(_, body) => for_each_block(body, f),
            _ => {}
        }
    }
}

fn walk_expr(e: &mut Expr, f: &mut impl FnMut(&mut Expr)) {
    f(e);
    match e {
        Expr::Bin(l, _, r) => {
            walk_expr(l, f);
            walk_expr(r, f);
        }
        Expr::Neg(x) | Expr::Paren(x) => walk_expr(x, f),
        Expr::Call(_, args) => args.iter_mut().for_each(|a| walk_expr(a, f)),
        _ => {}
    }
}

fn for_each_expr(stmts: &mut [Stmt], f: &mut impl FnMut(&mut Expr)) {
    for s in stmts {
        match s {
            Stmt::Decl(_, _, e) | Stmt::Assign(_, _, e) | Stmt::Return(e) => walk_expr(e, f),
            Stmt::Call(_, args) => args.iter_mut().for_each(|a| walk_expr(a, f)),
            Stmt::If(c, then, otherwise) => {
                walk_expr(c, f);
                for_each_expr(then, f);
                if let Some(o) = otherwise {
                    for_each_expr(o, f);
                }
            }
            Stmt::For(_, bound, body) => {
                walk_expr(bound, f);
                for_each_expr(body, f);
            }
            Stmt::While(c, body) => {
                walk_expr(c, f);
                for_each_expr(body, f);
            }
            Stmt::Incr(..) | Stmt::Comment(_) => {}
        }
    }
}

fn mutate(p: &mut Program, op: MutationOp, rng: &mut SplitMix64) {
    match op {
        MutationOp::RenameIdentifiers => {
            let mut taken = HashSet::new();
            p.names = fresh_names(rng, p.names.len(), &mut taken);
        }
        MutationOp::InsertComments => {
            let n = rng.range_inclusive(2, 6);
            for _ in 0..n {
                if rng.chance(0.3) {
                    let fi = rng.below(p.functions.len());
                    p.functions[fi].doc = Some(comment_text(rng));
                    continue;
                }
                let fi = rng.below(p.functions.len());
                let mut blocks = 0usize;
                for_each_block(&mut p.functions[fi].body, &mut |_| blocks += 1);
                let target = rng.below(blocks);
                let text = comment_text(rng);
                let pos_seed = rng.next_u64();
                let mut k = 0usize;
                for_each_block(&mut p.functions[fi].body, &mut |b| {
                    if k == target {
                        let at = (pos_seed % (b.len() as u64 + 1)) as usize;
                        b.insert(at, Stmt::Comment(text.clone()));
                    }
                    k += 1;
                });
            }
        }
        MutationOp::DeleteComments => {
            p.header = None;
            for g in &mut p.globals {
                g.comment = None;
            }
            for f in &mut p.functions {
                f.doc = None;
                for_each_block(&mut f.body, &mut |b| b.retain(|s| !matches!(s, Stmt::Comment(_))));
            }
        }
        MutationOp::ReorderFunctions => {
            if p.functions.len() > 1 {
                let original = p.functions.clone();
                for _ in 0..8 {
                    rng.shuffle(&mut p.functions);
                    if p.functions != original {
                        break;
                    }
                }
            }
        }
        MutationOp::PerturbLiterals => {
            let mut perturb = |e: &mut Expr| {
                if let Expr::Lit(lit) = e {
                    *lit = match *lit {
                        Lit::Int(v) => Lit::Int(v + rng.range_inclusive(1, 20) as i64),
                        Lit::Float(v) => Lit::Float(v + rng.range_inclusive(1, 8) as f64 / 4.0),
                    };
                }
            };
            for g in &mut p.globals {
                walk_expr(&mut g.init, &mut perturb);
            }
            for f in &mut p.functions {
                for_each_expr(&mut f.body, &mut perturb);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering

struct Printer<'p> {
    names: &'p [String],
    out: String,
}

impl<'p> Printer<'p> {
    fn name(&self, n: Name) -> &'p str {
        match n {
            Name::User(i) => &self.names[i],
            Name::Api(s) => s,
        }
    }

    fn indent(&mut self, level: usize) {
        for _ in 0..level {
            self.out.push_str("  ");
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Var(n) => {
                let s = self.name(*n);
                self.out.push_str(s);
            }
            Expr::Lit(Lit::Int(v)) => {
                let _ = write!(self.out, "{v}");
            }
            Expr::Lit(Lit::Float(v)) => {
                let _ = write!(self.out, "{v:?}");
            }
            Expr::Bool(b) => {
                let _ = write!(self.out, "{b}");
            }
            Expr::Str(s) => {
                let _ = write!(self.out, "\"{s}\"");
            }
            Expr::Bin(l, op, r) => {
                self.expr(l);
                let _ = write!(self.out, " {op} ");
                self.expr(r);
            }
            Expr::Neg(x) => {
                self.out.push('-');
                self.expr(x);
            }
            Expr::Paren(x) => {
                self.out.push('(');
                self.expr(x);
                self.out.push(')');
            }
            Expr::Call(f, args) => {
                let s = self.name(*f);
                self.out.push_str(s);
                self.args(args);
            }
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a);
        }
        self.out.push(')');
    }

    fn block(&mut self, stmts: &[Stmt], level: usize) {
        for s in stmts {
            self.stmt(s, level);
        }
    }

    fn stmt(&mut self, s: &Stmt, level: usize) {
        self.indent(level);
        match s {
            Stmt::Decl(ty, n, e) => {
                let _ = write!(self.out, "{} {} = ", ty.as_str(), self.name(*n));
                self.expr(e);
                self.out.push_str(";\n");
            }
            Stmt::Assign(n, op, e) => {
                let _ = write!(self.out, "{} {op} ", self.name(*n));
                self.expr(e);
                self.out.push_str(";\n");
            }
            Stmt::Incr(n, op) => {
                let _ = writeln!(self.out, "{}{op};", self.name(*n));
            }
            Stmt::Call(f, args) => {
                let s = self.name(*f);
                self.out.push_str(s);
                self.args(args);
                self.out.push_str(";\n");
            }
            Stmt::If(c, then, otherwise) => {
                self.out.push_str("if (");
                self.expr(c);
                self.out.push_str(") {\n");
                self.block(then, level + 1);
                self.indent(level);
                self.out.push('}');
                if let Some(o) = otherwise {
                    self.out.push_str(" else {\n");
                    self.block(o, level + 1);
                    self.indent(level);
                    self.out.push('}');
                }
                self.out.push('\n');
            }
            Stmt::For(i, bound, body) => {
                let v = self.name(*i);
                let _ = write!(self.out, "for (int {v} = 0; {v} < ");
                self.expr(bound);
                let _ = writeln!(self.out, "; {v}++) {{");
                self.block(body, level + 1);
                self.indent(level);
                self.out.push_str("}\n");
            }
            Stmt::While(c, body) => {
                self.out.push_str("while (");
                self.expr(c);
                self.out.push_str(") {\n");
                self.block(body, level + 1);
                self.indent(level);
                self.out.push_str("}\n");
            }
            Stmt::Return(e) => {
                self.out.push_str("return ");
                self.expr(e);
                self.out.push_str(";\n");
            }
            Stmt::Comment(c) => {
                let _ = writeln!(self.out, "// {c}");
            }
        }
    }
}

fn render(p: &Program) -> String {
    let mut pr = Printer {
        names: &p.names,
        out: String::new(),
    };
    if let Some(h) = &p.header {
        let _ = writeln!(pr.out, "/* {h} */\n");
    }
    for g in &p.globals {
        if let Some(c) = &g.comment {
            let _ = writeln!(pr.out, "// {c}");
        }
        let _ = write!(pr.out, "{} {} = ", g.ty.as_str(), pr.name(g.name));
        pr.expr(&g.init);
        pr.out.push_str(";\n");
    }
    for f in &p.functions {
        pr.out.push('\n');
        if let Some(d) = &f.doc {
            let _ = writeln!(pr.out, "// {d}");
        }
        let ret = f.ret.map_or("void", Ty::as_str);
        let _ = write!(pr.out, "{ret} {}(", pr.name(f.name));
        for (i, (ty, n)) in f.params.iter().enumerate() {
            if i > 0 {
                pr.out.push_str(", ");
            }
            let _ = write!(pr.out, "{} {}", ty.as_str(), pr.name(*n));
        }
        pr.out.push_str(") {\n");
        pr.block(&f.body, 1);
        pr.out.push_str("}\n");
    }
    pr.out
}

/// Source text of the starter template shared by every generated original.
pub fn template_source() -> String {
    render(&template_program())
}

pub const TEMPLATE_ID: &str = "template";

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    if config.num_originals < 2 {
        return Err(Error::InvalidConfig("num_originals must be at least 2".into()));
    }
    if config.num_plagiarized > 0 && config.mutations_per_copy > 0 && config.mutation_ops.is_empty() {
        return Err(Error::InvalidConfig("mutation_ops is empty".into()));
    }
    let mut rng = SplitMix64::new(config.seed);
    let originals: Vec<Program> = (0..config.num_originals)
        .map(|_| generate_original(&mut rng))
        .collect();

    // Each copy gets its own origin while originals last.
    let distinct = config.num_plagiarized.min(config.num_originals);
    let mut origin_of: Vec<usize> = rng.sample_indices(config.num_originals, distinct);
    for _ in distinct..config.num_plagiarized {
        origin_of.push(rng.below(config.num_originals));
    }
    let copies: Vec<Program> = origin_of
        .iter()
        .map(|&o| {
            let mut p = originals[o].clone();
            for _ in 0..config.mutations_per_copy {
                let op = *rng.pick(&config.mutation_ops);
                mutate(&mut p, op, &mut rng);
            }
            p
        })
        .collect();

    // Shuffled ids so a file name says nothing about its role.
    let total = config.num_originals + config.num_plagiarized;
    let width = total.to_string().len().max(3);
    let mut slots: Vec<usize> = (0..total).collect();
    rng.shuffle(&mut slots);
    let id = |k: usize| format!("sub{:0width$}", slots[k], width = width);

    let mut files: Vec<SourceFile> = Vec::with_capacity(total);
    for (k, p) in originals.iter().chain(copies.iter()).enumerate() {
        let name = id(k);
        files.push(SourceFile::new(name.clone(), format!("{name}.pde"), render(p)));
    }

    let mut labels = LabelSet::new();
    let n = config.num_originals;
    let origin = |k: usize| if k < n { k } else { origin_of[k - n] };
    for i in 0..total {
        for j in i + 1..total {
            let label = match (i < n, j < n) {
                (true, true) => Some(Label::Clean),
                (true, false) => Some(if origin(j) == i { Label::Plagiarized } else { Label::Clean }),
                (false, false) => (origin(i) != origin(j)).then_some(Label::Clean),
                (false, true) => unreachable!("i < j and originals come first"),
            };
            if let Some(label) = label {
                labels.insert(&id(i), &id(j), label);
            }
        }
    }
    let provenance = (0..config.num_plagiarized)
        .map(|c| (id(n + c), id(origin_of[c])))
        .collect();
    let template = SourceFile::new(TEMPLATE_ID, format!("{TEMPLATE_ID}.pde"), template_source());
    Ok(SyntheticCorpus {
        corpus: Corpus::new(files, Some(template))?,
        labels,
        provenance,
    })
}
