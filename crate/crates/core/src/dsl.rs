//! The `.gpd` document format: a line-oriented list of named blocks.
//!
//! ```text
//! [groupoid Z2]
//! elements = e g
//! units = e
//! inv g = g
//! mul g g = e
//! ```
//!
//! Parsing resolves every name; [`elaborate`] turns a document into core
//! objects. Law checking is left to the checkers, so a document whose tables
//! break a groupoid axiom still elaborates.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::dr::StarCommutingSystem;
use crate::fell::{CMat, CoordBundle, FellBundle, FellLeftAction, FellRightAction, Tol};
use crate::groupoid::FiniteGroupoid;
use crate::ssa::{LeftAction, RightAction};
use crate::Id;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagKind {
    /// Malformed token, bracket or number.
    Lexical,
    /// Unknown or duplicated name, or a statement in the wrong block.
    Reference,
    /// Wrong number of operands.
    Arity,
    /// Well-formed text that does not describe a core object.
    Elaboration,
}

impl fmt::Display for DiagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagKind::Lexical => "lexical",
            DiagKind::Reference => "reference",
            DiagKind::Arity => "arity",
            DiagKind::Elaboration => "elaboration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{line}:{col}: {kind} error: {message}")]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn diag(kind: DiagKind, at: Pos, message: impl Into<String>) -> Diagnostic {
    Diagnostic { kind, line: at.line, col: at.col, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Groupoid,
    LeftAction,
    RightAction,
    FellBundle,
    FellAction,
    DrSystem,
}

impl BlockKind {
    pub const ALL: [BlockKind; 6] = [
        BlockKind::Groupoid,
        BlockKind::LeftAction,
        BlockKind::RightAction,
        BlockKind::FellBundle,
        BlockKind::FellAction,
        BlockKind::DrSystem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BlockKind::Groupoid => "groupoid",
            BlockKind::LeftAction => "left-action",
            BlockKind::RightAction => "right-action",
            BlockKind::FellBundle => "fell-bundle",
            BlockKind::FellAction => "fell-action",
            BlockKind::DrSystem => "dr-system",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    fn allows(self, kw: &str) -> bool {
        let allowed: &[&str] = match self {
            BlockKind::Groupoid => &["elements", "units", "src", "rng", "inv", "mul"],
            BlockKind::LeftAction | BlockKind::RightAction => &["acting", "on", "rho0", "act", "restr"],
            BlockKind::FellBundle => &["groupoid", "dim", "basis"],
            BlockKind::FellAction => &["action", "bundle", "map"],
            BlockKind::DrSystem => &["elements", "perm"],
        };
        allowed.contains(&kw)
    }
}

/// Row-major complex entries; the shape comes from the fiber dimensions.
pub type Entries = Vec<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Elements(Vec<String>),
    Units(Vec<String>),
    Src(String, String),
    Rng(String, String),
    Inv(String, String),
    Mul(String, String, String),
    Rho0(String, String),
    Act(String, String, String),
    Restr(String, String, String),
    Dim(String, usize),
    Basis(String, Vec<Entries>),
    Perm(String, Vec<Vec<String>>),
    /// `acting`, `on`, `groupoid`, `action` or `bundle` naming another block.
    Ref(String, String),
    /// Coordinates of a bundle action map, target dimension by source dimension.
    Map(String, String, Entries),
}

const REF_KEYS: [&str; 5] = ["acting", "on", "groupoid", "action", "bundle"];

impl Stmt {
    /// Identity of what the statement defines; two statements with the same
    /// key in one block are a duplicate definition.
    fn key(&self) -> String {
        match self {
            Stmt::Elements(_) => "elements".into(),
            Stmt::Units(_) => "units".into(),
            Stmt::Src(a, _) => format!("src {a}"),
            Stmt::Rng(a, _) => format!("rng {a}"),
            Stmt::Inv(a, _) => format!("inv {a}"),
            Stmt::Mul(a, b, _) => format!("mul {a} {b}"),
            Stmt::Rho0(u, _) => format!("rho0 {u}"),
            Stmt::Act(a, b, _) => format!("act {a} {b}"),
            Stmt::Restr(a, b, _) => format!("restr {a} {b}"),
            Stmt::Dim(u, _) => format!("dim {u}"),
            Stmt::Basis(x, _) => format!("basis {x}"),
            Stmt::Perm(s, _) => format!("perm {s}"),
            Stmt::Ref(k, _) => k.clone(),
            Stmt::Map(a, b, _) => format!("map {a} {b}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Block {
    pub kind: BlockKind,
    pub name: String,
    pub stmts: Vec<Stmt>,
    /// Header position.
    pub at: Pos,
    /// One position per statement; empty for generated blocks.
    pub spans: Vec<Pos>,
}

impl PartialEq for Block {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.name == other.name && self.stmts == other.stmts
    }
}

impl Block {
    pub fn new(kind: BlockKind, name: impl Into<String>) -> Self {
        Block { kind, name: name.into(), stmts: Vec::new(), at: Pos::default(), spans: Vec::new() }
    }

    fn span(&self, i: usize) -> Pos {
        self.spans.get(i).copied().unwrap_or(self.at)
    }

    fn refs(&self, key: &str) -> Option<&str> {
        self.stmts.iter().find_map(|s| match s {
            Stmt::Ref(k, v) if k == key => Some(v.as_str()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
}

impl Document {
    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

// ---------------------------------------------------------------------------
// Lexing

/// A name may hold anything but whitespace, brackets, `=` and `#`.
pub fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && !c.is_control() && !"[]=#".contains(c))
}

#[derive(Debug, Clone)]
struct Tok {
    text: String,
    at: Pos,
}

/// Whitespace-separated words of `chars[from..to]`.
fn words(chars: &[char], from: usize, to: usize, line: usize) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut i = from;
    while i < to {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < to && !chars[i].is_whitespace() {
            i += 1;
        }
        out.push(Tok { text: chars[start..i].iter().collect(), at: Pos { line, col: start + 1 } });
    }
    out
}

fn name_tok(t: &Tok) -> Result<String, Diagnostic> {
    if let Some(off) = t.text.chars().position(|c| c.is_control() || "[]=#".contains(c)) {
        let at = Pos { line: t.at.line, col: t.at.col + off };
        return Err(diag(DiagKind::Lexical, at, format!("unexpected character in name `{}`", t.text)));
    }
    Ok(t.text.clone())
}

/// Character cursor over the right-hand side of one statement.
struct Cursor<'a> {
    chars: &'a [char],
    i: usize,
    end: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.i + 1 }
    }

    fn skip_ws(&mut self) {
        while self.i < self.end && self.chars[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        (self.i < self.end).then(|| self.chars[self.i])
    }

    fn expect(&mut self, c: char) -> Result<(), Diagnostic> {
        match self.peek() {
            Some(d) if d == c => {
                self.i += 1;
                Ok(())
            }
            Some(d) => Err(diag(DiagKind::Lexical, self.pos(), format!("expected `{c}`, found `{d}`"))),
            None => Err(diag(DiagKind::Lexical, self.pos(), format!("expected `{c}`, found end of line"))),
        }
    }

    fn number(&mut self) -> Result<f64, Diagnostic> {
        self.skip_ws();
        let at = self.pos();
        let start = self.i;
        while self.i < self.end && (self.chars[self.i].is_ascii_alphanumeric() || "+-.".contains(self.chars[self.i])) {
            self.i += 1;
        }
        let text: String = self.chars[start..self.i].iter().collect();
        text.parse::<f64>()
            .map_err(|_| diag(DiagKind::Lexical, at, format!("malformed number `{text}`")))
    }

    /// `[re,im; re,im; ...]`
    fn entries(&mut self) -> Result<Entries, Diagnostic> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.i += 1;
            return Ok(out);
        }
        loop {
            let re = self.number()?;
            self.expect(',')?;
            let im = self.number()?;
            out.push(Complex64::new(re, im));
            match self.peek() {
                Some(';') => self.i += 1,
                Some(']') => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(diag(DiagKind::Lexical, self.pos(), "expected `;` or `]` in a matrix")),
            }
        }
    }

    /// `[[...],[...]]`
    fn basis(&mut self) -> Result<Vec<Entries>, Diagnostic> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.i += 1;
            return Ok(out);
        }
        loop {
            out.push(self.entries()?);
            match self.peek() {
                Some(',') => self.i += 1,
                Some(']') => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(diag(DiagKind::Lexical, self.pos(), "expected `,` or `]` in a basis")),
            }
        }
    }

    /// `(a b c)(d e)`, each point with its position.
    fn cycles(&mut self) -> Result<Vec<Vec<Tok>>, Diagnostic> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c != '(' {
                return Err(diag(DiagKind::Lexical, self.pos(), format!("expected `(`, found `{c}`")));
            }
            self.i += 1;
            let mut cyc = Vec::new();
            loop {
                match self.peek() {
                    Some(')') => {
                        self.i += 1;
                        break;
                    }
                    Some('(') => return Err(diag(DiagKind::Lexical, self.pos(), "nested `(` in a cycle")),
                    None => return Err(diag(DiagKind::Lexical, self.pos(), "unterminated cycle")),
                    Some(_) => {
                        let at = self.pos();
                        let start = self.i;
                        while self.i < self.end && !self.chars[self.i].is_whitespace() && !"()".contains(self.chars[self.i]) {
                            self.i += 1;
                        }
                        let tok = Tok { text: self.chars[start..self.i].iter().collect(), at };
                        name_tok(&tok)?;
                        cyc.push(tok);
                    }
                }
            }
            out.push(cyc);
        }
        Ok(out)
    }

    fn done(&mut self) -> Result<(), Diagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(diag(DiagKind::Lexical, self.pos(), format!("unexpected `{c}` after the value"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing with name resolution

#[derive(Debug, Default)]
struct Scope {
    kind: Option<BlockKind>,
    elements: Option<HashMap<String, Id>>,
    refs: HashMap<String, String>,
    keys: HashSet<String>,
}

struct Parser {
    doc: Document,
    symbols: HashMap<String, Scope>,
    cur: Option<Scope>,
}

fn lhs_arity(kw: &str) -> Option<usize> {
    Some(match kw {
        "elements" | "units" => 0,
        "src" | "rng" | "inv" | "rho0" | "dim" | "basis" | "perm" => 1,
        "mul" | "act" | "restr" | "map" => 2,
        k if REF_KEYS.contains(&k) => 0,
        _ => return None,
    })
}

impl Parser {
    fn scope(&self) -> &Scope {
        self.cur.as_ref().expect("inside a block")
    }

    fn block_kind(&self) -> BlockKind {
        self.scope().kind.expect("block kind set")
    }

    fn lookup_block(&self, name: &str) -> Option<&Scope> {
        self.symbols.get(name)
    }

    fn elements_of(&self, block: &str) -> Option<&HashMap<String, Id>> {
        self.lookup_block(block).and_then(|s| s.elements.as_ref())
    }

    /// `name` must be an element of the groupoid the current block refers to by `key`.
    fn resolve_in(&self, key: &str, t: &Tok) -> Result<(), Diagnostic> {
        let sc = self.scope();
        let elems = match key {
            "self" => sc.elements.as_ref(),
            _ => {
                let Some(target) = self.target_groupoid(key) else {
                    return Err(diag(DiagKind::Reference, t.at, format!("`{key}` must be declared before `{}` is used", t.text)));
                };
                self.elements_of(&target)
            }
        };
        let Some(elems) = elems else {
            return Err(diag(DiagKind::Reference, t.at, "`elements` must be declared first"));
        };
        if !elems.contains_key(&t.text) {
            return Err(diag(DiagKind::Reference, t.at, format!("unknown element `{}`", t.text)));
        }
        Ok(())
    }

    /// The groupoid block named by `acting`/`on`/`groupoid`, or for a
    /// fell-action the acting/on groupoid of its action.
    fn target_groupoid(&self, key: &str) -> Option<String> {
        let sc = self.scope();
        match sc.kind? {
            BlockKind::FellAction => {
                let action = self.lookup_block(sc.refs.get("action")?)?;
                action.refs.get(key).cloned()
            }
            _ => sc.refs.get(key).cloned(),
        }
    }

    fn header(&mut self, chars: &[char], line: usize, first: usize, last: usize) -> Result<(), Diagnostic> {
        let at = Pos { line, col: first + 1 };
        if chars[last] != ']' {
            return Err(diag(DiagKind::Lexical, Pos { line, col: last + 1 }, "block header must end with `]`"));
        }
        let toks = words(chars, first + 1, last, line);
        if toks.len() != 2 {
            return Err(diag(DiagKind::Arity, at, format!("block header takes a kind and a name, found {} word(s)", toks.len())));
        }
        let kind = BlockKind::from_str(&toks[0].text)
            .ok_or_else(|| diag(DiagKind::Reference, toks[0].at, format!("unknown block kind `{}`", toks[0].text)))?;
        let name = name_tok(&toks[1])?;
        if self.symbols.contains_key(&name) || self.doc.blocks.iter().any(|b| b.name == name) {
            return Err(diag(DiagKind::Reference, toks[1].at, format!("block `{name}` already defined")));
        }
        self.finish_block();
        let mut b = Block::new(kind, name);
        b.at = at;
        self.doc.blocks.push(b);
        self.cur = Some(Scope { kind: Some(kind), ..Scope::default() });
        Ok(())
    }

    fn finish_block(&mut self) {
        if let (Some(sc), Some(b)) = (self.cur.take(), self.doc.blocks.last()) {
            self.symbols.insert(b.name.clone(), sc);
        }
    }

    fn statement(&mut self, chars: &[char], line: usize, first: usize, last: usize) -> Result<(), Diagnostic> {
        let at = Pos { line, col: first + 1 };
        if self.cur.is_none() {
            return Err(diag(DiagKind::Reference, at, "statement outside any block"));
        }
        let Some(eq) = (first..=last).find(|&i| chars[i] == '=') else {
            return Err(diag(DiagKind::Lexical, Pos { line, col: last + 2 }, "expected `=`"));
        };
        let lhs = words(chars, first, eq, line);
        let kw = &lhs[0].text;
        let Some(arity) = lhs_arity(kw) else {
            return Err(diag(DiagKind::Reference, at, format!("unknown statement `{kw}`")));
        };
        let kind = self.block_kind();
        if !kind.allows(kw) {
            return Err(diag(DiagKind::Reference, at, format!("`{kw}` is not allowed in a {} block", kind.as_str())));
        }
        if lhs.len() - 1 != arity {
            return Err(diag(DiagKind::Arity, at, format!("`{kw}` takes {arity} operand(s) before `=`, found {}", lhs.len() - 1)));
        }
        let args: Vec<String> = lhs[1..].iter().map(name_tok).collect::<Result<_, _>>()?;
        let rhs_at = Pos { line, col: eq + 2 };
        let mut cur = Cursor { chars, i: eq + 1, end: last + 1, line };

        let single = || -> Result<Tok, Diagnostic> {
            let toks = words(chars, eq + 1, last + 1, line);
            if toks.len() != 1 {
                return Err(diag(DiagKind::Arity, rhs_at, format!("`{kw}` takes one value after `=`, found {}", toks.len())));
            }
            name_tok(&toks[0])?;
            Ok(toks[0].clone())
        };

        let stmt = match kw.as_str() {
            "elements" | "units" => {
                let toks = words(chars, eq + 1, last + 1, line);
                let mut seen = HashSet::new();
                for t in &toks {
                    name_tok(t)?;
                    if !seen.insert(t.text.clone()) {
                        return Err(diag(DiagKind::Reference, t.at, format!("`{}` listed twice", t.text)));
                    }
                    if kw == "units" {
                        self.resolve_in("self", t)?;
                    }
                }
                let names: Vec<String> = toks.into_iter().map(|t| t.text).collect();
                if kw == "elements" {
                    if self.scope().elements.is_some() {
                        return Err(diag(DiagKind::Reference, at, "`elements` already defined"));
                    }
                    let map = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
                    self.cur.as_mut().unwrap().elements = Some(map);
                    Stmt::Elements(names)
                } else {
                    Stmt::Units(names)
                }
            }
            "src" | "rng" | "inv" => {
                let v = single()?;
                self.resolve_in("self", &lhs[1])?;
                self.resolve_in("self", &v)?;
                let (a, b) = (args[0].clone(), v.text);
                match kw.as_str() {
                    "src" => Stmt::Src(a, b),
                    "rng" => Stmt::Rng(a, b),
                    _ => Stmt::Inv(a, b),
                }
            }
            "mul" => {
                let v = single()?;
                for t in [&lhs[1], &lhs[2], &v] {
                    self.resolve_in("self", t)?;
                }
                Stmt::Mul(args[0].clone(), args[1].clone(), v.text)
            }
            "acting" | "on" | "groupoid" | "action" | "bundle" => {
                let v = single()?;
                let want: &[BlockKind] = match kw.as_str() {
                    "action" => &[BlockKind::LeftAction, BlockKind::RightAction],
                    "bundle" => &[BlockKind::FellBundle],
                    _ => &[BlockKind::Groupoid],
                };
                match self.lookup_block(&v.text).and_then(|s| s.kind) {
                    Some(k) if want.contains(&k) => {}
                    Some(k) => {
                        return Err(diag(DiagKind::Reference, v.at, format!("`{}` is a {} block, not a {}", v.text, k.as_str(), want[0].as_str())))
                    }
                    None => return Err(diag(DiagKind::Reference, v.at, format!("unknown block `{}`", v.text))),
                }
                self.cur.as_mut().unwrap().refs.insert(kw.clone(), v.text.clone());
                Stmt::Ref(kw.clone(), v.text)
            }
            "rho0" => {
                let v = single()?;
                self.resolve_in("on", &lhs[1])?;
                self.resolve_in("acting", &v)?;
                Stmt::Rho0(args[0].clone(), v.text)
            }
            "act" | "restr" => {
                let v = single()?;
                let left = kind == BlockKind::LeftAction;
                let (k1, k2) = if left { ("acting", "on") } else { ("on", "acting") };
                self.resolve_in(k1, &lhs[1])?;
                self.resolve_in(k2, &lhs[2])?;
                let kv = if kw == "act" { "on" } else { "acting" };
                self.resolve_in(kv, &v)?;
                if kw == "act" {
                    Stmt::Act(args[0].clone(), args[1].clone(), v.text)
                } else {
                    Stmt::Restr(args[0].clone(), args[1].clone(), v.text)
                }
            }
            "dim" => {
                self.resolve_in("groupoid", &lhs[1])?;
                let toks = words(chars, eq + 1, last + 1, line);
                if toks.len() != 1 {
                    return Err(diag(DiagKind::Arity, rhs_at, format!("`dim` takes one value after `=`, found {}", toks.len())));
                }
                let d = toks[0]
                    .text
                    .parse::<usize>()
                    .map_err(|_| diag(DiagKind::Lexical, toks[0].at, format!("malformed dimension `{}`", toks[0].text)))?;
                Stmt::Dim(args[0].clone(), d)
            }
            "basis" => {
                self.resolve_in("groupoid", &lhs[1])?;
                let b = cur.basis()?;
                cur.done()?;
                Stmt::Basis(args[0].clone(), b)
            }
            "map" => {
                let Some(action) = self.scope().refs.get("action").cloned() else {
                    return Err(diag(DiagKind::Reference, at, "`action` must be declared before `map`"));
                };
                let left = self.lookup_block(&action).and_then(|s| s.kind) == Some(BlockKind::LeftAction);
                let (k1, k2) = if left { ("acting", "on") } else { ("on", "acting") };
                self.resolve_in(k1, &lhs[1])?;
                self.resolve_in(k2, &lhs[2])?;
                let m = cur.entries()?;
                cur.done()?;
                Stmt::Map(args[0].clone(), args[1].clone(), m)
            }
            "perm" => {
                if args[0] != "S" && args[0] != "T" {
                    return Err(diag(DiagKind::Reference, lhs[1].at, format!("unknown map `{}`; expected S or T", args[0])));
                }
                let cycles = cur.cycles()?;
                let mut seen = HashSet::new();
                for t in cycles.iter().flatten() {
                    self.resolve_in("self", t)?;
                    if !seen.insert(t.text.clone()) {
                        return Err(diag(DiagKind::Reference, t.at, format!("point `{}` appears twice", t.text)));
                    }
                }
                Stmt::Perm(args[0].clone(), cycles.into_iter().map(|c| c.into_iter().map(|t| t.text).collect()).collect())
            }
            _ => unreachable!("arity table covers every keyword"),
        };
        let key = stmt.key();
        if !self.cur.as_mut().unwrap().keys.insert(key.clone()) {
            return Err(diag(DiagKind::Reference, at, format!("`{key}` already defined")));
        }
        let b = self.doc.blocks.last_mut().expect("inside a block");
        b.stmts.push(stmt);
        b.spans.push(at);
        Ok(())
    }
}

/// Parses and resolves names; stops at the first diagnostic.
pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    let mut p = Parser { doc: Document::default(), symbols: HashMap::new(), cur: None };
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let chars: Vec<char> = raw.chars().collect();
        let end = chars.iter().position(|&c| c == '#').unwrap_or(chars.len());
        let Some(first) = (0..end).find(|&i| !chars[i].is_whitespace()) else { continue };
        let last = (0..end).rev().find(|&i| !chars[i].is_whitespace()).expect("non-empty");
        if let Some(i) = (first..=last).find(|&i| chars[i].is_control() && chars[i] != '\t') {
            return Err(diag(DiagKind::Lexical, Pos { line, col: i + 1 }, "control character"));
        }
        if chars[first] == '[' {
            p.header(&chars, line, first, last)?;
        } else {
            p.statement(&chars, line, first, last)?;
        }
    }
    p.finish_block();
    Ok(p.doc)
}

// ---------------------------------------------------------------------------
// Printing

fn fmt_entries(e: &Entries) -> String {
    let parts: Vec<String> = e.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
    format!("[{}]", parts.join(";"))
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Elements(v) => write!(f, "elements = {}", v.join(" ")),
            Stmt::Units(v) => write!(f, "units = {}", v.join(" ")),
            Stmt::Src(a, b) => write!(f, "src {a} = {b}"),
            Stmt::Rng(a, b) => write!(f, "rng {a} = {b}"),
            Stmt::Inv(a, b) => write!(f, "inv {a} = {b}"),
            Stmt::Mul(a, b, c) => write!(f, "mul {a} {b} = {c}"),
            Stmt::Rho0(a, b) => write!(f, "rho0 {a} = {b}"),
            Stmt::Act(a, b, c) => write!(f, "act {a} {b} = {c}"),
            Stmt::Restr(a, b, c) => write!(f, "restr {a} {b} = {c}"),
            Stmt::Dim(u, d) => write!(f, "dim {u} = {d}"),
            Stmt::Basis(x, ms) => {
                let parts: Vec<String> = ms.iter().map(fmt_entries).collect();
                write!(f, "basis {x} = [{}]", parts.join(","))
            }
            Stmt::Perm(s, cycles) => {
                let parts: Vec<String> = cycles.iter().map(|c| format!("({})", c.join(" "))).collect();
                write!(f, "perm {s} = {}", parts.concat())
            }
            Stmt::Ref(k, v) => write!(f, "{k} = {v}"),
            Stmt::Map(a, b, m) => write!(f, "map {a} {b} = {}", fmt_entries(m)),
        }
    }
}

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (i, b) in doc.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("[{} {}]\n", b.kind.as_str(), b.name));
        for s in &b.stmts {
            out.push_str(&s.to_string());
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Elaboration

#[derive(Debug, Clone)]
pub struct ActionDecl<A> {
    pub acting: String,
    pub on: String,
    pub action: A,
}

#[derive(Debug, Clone)]
pub struct BundleDecl {
    pub groupoid: String,
    pub bundle: FellBundle,
}

#[derive(Debug, Clone)]
pub enum FellActionDecl {
    Left { action: String, bundle: String, fell: FellLeftAction },
    Right { action: String, bundle: String, fell: FellRightAction },
}

/// Core objects by block name.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub order: Vec<(BlockKind, String)>,
    pub groupoids: BTreeMap<String, FiniteGroupoid>,
    pub left_actions: BTreeMap<String, ActionDecl<LeftAction>>,
    pub right_actions: BTreeMap<String, ActionDecl<RightAction>>,
    pub bundles: BTreeMap<String, BundleDecl>,
    pub fell_actions: BTreeMap<String, FellActionDecl>,
    pub dr_systems: BTreeMap<String, StarCommutingSystem>,
}

fn elab(at: Pos, message: impl Into<String>) -> Diagnostic {
    diag(DiagKind::Elaboration, at, message)
}

fn index_of(names: &[String]) -> HashMap<&str, Id> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

struct Names<'a> {
    idx: HashMap<&'a str, Id>,
}

impl<'a> Names<'a> {
    fn from_groupoid(g: &'a FiniteGroupoid) -> Self {
        Names { idx: index_of(g.labels()) }
    }

    fn get(&self, n: &str, at: Pos) -> Result<Id, Diagnostic> {
        self.idx
            .get(n)
            .copied()
            .ok_or_else(|| diag(DiagKind::Reference, at, format!("unknown element `{n}`")))
    }
}

fn elaborate_groupoid(b: &Block) -> Result<FiniteGroupoid, Diagnostic> {
    let names = b
        .stmts
        .iter()
        .find_map(|s| if let Stmt::Elements(v) = s { Some(v.clone()) } else { None })
        .ok_or_else(|| elab(b.at, format!("groupoid `{}` has no `elements`", b.name)))?;
    let idx = Names { idx: index_of(&names) };
    let n = names.len();
    let mut units = Vec::new();
    let (mut src, mut rng, mut inv) = (vec![None; n], vec![None; n], vec![None; n]);
    let mut mul = HashMap::new();
    for (i, s) in b.stmts.iter().enumerate() {
        let at = b.span(i);
        match s {
            Stmt::Units(v) => {
                for u in v {
                    units.push(idx.get(u, at)?);
                }
            }
            Stmt::Src(a, u) => src[idx.get(a, at)?] = Some(idx.get(u, at)?),
            Stmt::Rng(a, u) => rng[idx.get(a, at)?] = Some(idx.get(u, at)?),
            Stmt::Inv(a, u) => inv[idx.get(a, at)?] = Some(idx.get(u, at)?),
            Stmt::Mul(a, c, d) => {
                mul.insert((idx.get(a, at)?, idx.get(c, at)?), idx.get(d, at)?);
            }
            _ => {}
        }
    }
    for &u in &units {
        src[u].get_or_insert(u);
        rng[u].get_or_insert(u);
        inv[u].get_or_insert(u);
    }
    // A single unit makes the block a group: src and rng are forced.
    if let [u] = units[..] {
        for a in 0..n {
            src[a].get_or_insert(u);
            rng[a].get_or_insert(u);
        }
    }
    let total = |t: Vec<Option<Id>>, what: &str| -> Result<Vec<Id>, Diagnostic> {
        t.into_iter()
            .enumerate()
            .map(|(a, v)| v.ok_or_else(|| elab(b.at, format!("`{what} {}` is not defined", names[a]))))
            .collect()
    };
    let (src, rng, inv) = (total(src, "src")?, total(rng, "rng")?, total(inv, "inv")?);
    // Products with a unit are implied.
    for a in 0..n {
        for &u in &units {
            if src[a] == u {
                mul.entry((a, u)).or_insert(a);
            }
            if rng[a] == u {
                mul.entry((u, a)).or_insert(a);
            }
        }
    }
    FiniteGroupoid::new(units, src, rng, inv, mul, Some(names)).map_err(|e| elab(b.at, e.to_string()))
}

type ActionTables = (HashMap<Id, Id>, HashMap<(Id, Id), Id>, HashMap<(Id, Id), Id>);

fn action_tables(b: &Block, acting: &FiniteGroupoid, on: &FiniteGroupoid, left: bool) -> Result<ActionTables, Diagnostic> {
    let (na, no) = (Names::from_groupoid(acting), Names::from_groupoid(on));
    let (mut rho, mut act, mut restr) = (HashMap::new(), HashMap::new(), HashMap::new());
    for (i, s) in b.stmts.iter().enumerate() {
        let at = b.span(i);
        let pair = |p: &str, q: &str| -> Result<(Id, Id), Diagnostic> {
            if left {
                Ok((na.get(p, at)?, no.get(q, at)?))
            } else {
                Ok((no.get(p, at)?, na.get(q, at)?))
            }
        };
        match s {
            Stmt::Rho0(u, w) => {
                rho.insert(no.get(u, at)?, na.get(w, at)?);
            }
            Stmt::Act(p, q, y) => {
                act.insert(pair(p, q)?, no.get(y, at)?);
            }
            Stmt::Restr(p, q, k) => {
                restr.insert(pair(p, q)?, na.get(k, at)?);
            }
            _ => {}
        }
    }
    Ok((rho, act, restr))
}

fn required_ref<'a>(b: &'a Block, key: &str) -> Result<&'a str, Diagnostic> {
    b.refs(key).ok_or_else(|| elab(b.at, format!("`{}` needs `{key} = ...`", b.name)))
}

fn entries_to_mat(e: &Entries, rows: usize, cols: usize, at: Pos) -> Result<CMat, Diagnostic> {
    if e.len() != rows * cols {
        return Err(elab(at, format!("expected {rows}x{cols} = {} entries, found {}", rows * cols, e.len())));
    }
    Ok(CMat::from_row_slice(rows, cols, e))
}

fn elaborate_bundle(b: &Block, g: &FiniteGroupoid) -> Result<FellBundle, Diagnostic> {
    let names = Names::from_groupoid(g);
    let mut dims = BTreeMap::new();
    let mut bases: Vec<Option<(Pos, &Vec<Entries>)>> = vec![None; g.len()];
    for (i, s) in b.stmts.iter().enumerate() {
        let at = b.span(i);
        match s {
            Stmt::Dim(u, d) => {
                let u = names.get(u, at)?;
                if !g.is_unit(u) {
                    return Err(elab(at, format!("`dim` given for non-unit `{}`", g.label(u))));
                }
                dims.insert(u, *d);
            }
            Stmt::Basis(x, ms) => bases[names.get(x, at)?] = Some((at, ms)),
            _ => {}
        }
    }
    if let Some(&u) = g.units().iter().find(|u| !dims.contains_key(u)) {
        return Err(elab(b.at, format!("`dim {}` is not defined", g.label(u))));
    }
    let mut fibers = Vec::with_capacity(g.len());
    for x in g.elements() {
        let (at, ms) = bases[x].ok_or_else(|| elab(b.at, format!("`basis {}` is not defined", g.label(x))))?;
        let (r, s) = (dims[&g.rng(x)], dims[&g.src(x)]);
        fibers.push(ms.iter().map(|m| entries_to_mat(m, r, s, at)).collect::<Result<Vec<_>, _>>()?);
    }
    FellBundle::new(g.clone(), dims, fibers, Tol::default()).map_err(|e| elab(b.at, e.to_string()))
}

fn fell_maps<'a>(b: &'a Block, acting: &FiniteGroupoid, on: &FiniteGroupoid, left: bool) -> Result<Vec<(Pos, Id, Id, &'a Entries)>, Diagnostic> {
    let (na, no) = (Names::from_groupoid(acting), Names::from_groupoid(on));
    let mut out = Vec::new();
    for (i, s) in b.stmts.iter().enumerate() {
        if let Stmt::Map(p, q, m) = s {
            let at = b.span(i);
            let (k1, k2) = if left { (na.get(p, at)?, no.get(q, at)?) } else { (no.get(p, at)?, na.get(q, at)?) };
            out.push((at, k1, k2, m));
        }
    }
    Ok(out)
}

fn elaborate_dr(b: &Block) -> Result<StarCommutingSystem, Diagnostic> {
    let names = b
        .stmts
        .iter()
        .find_map(|s| if let Stmt::Elements(v) = s { Some(v.clone()) } else { None })
        .ok_or_else(|| elab(b.at, format!("dr-system `{}` has no `elements`", b.name)))?;
    let idx = Names { idx: index_of(&names) };
    let n = names.len();
    let mut maps: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in b.stmts.iter().enumerate() {
        if let Stmt::Perm(which, cycles) = s {
            let at = b.span(i);
            let mut m: Vec<usize> = (0..n).collect();
            for c in cycles {
                let ids: Vec<usize> = c.iter().map(|p| idx.get(p, at)).collect::<Result<_, _>>()?;
                for (k, &p) in ids.iter().enumerate() {
                    m[p] = ids[(k + 1) % ids.len()];
                }
            }
            maps.insert(which.as_str(), m);
        }
    }
    let s = maps.remove("S").ok_or_else(|| elab(b.at, "`perm S` is not defined"))?;
    let t = maps.remove("T").ok_or_else(|| elab(b.at, "`perm T` is not defined"))?;
    StarCommutingSystem::new(n, s, t).map_err(|e| elab(b.at, e.to_string()))
}

/// Builds every block into its core object, in document order.
pub fn elaborate(doc: &Document) -> Result<Model, Diagnostic> {
    let mut m = Model::default();
    for b in &doc.blocks {
        m.order.push((b.kind, b.name.clone()));
        let gpd = |key: &str| -> Result<&FiniteGroupoid, Diagnostic> {
            let name = required_ref(b, key)?;
            m.groupoids
                .get(name)
                .ok_or_else(|| diag(DiagKind::Reference, b.at, format!("unknown groupoid `{name}`")))
        };
        match b.kind {
            BlockKind::Groupoid => {
                let g = elaborate_groupoid(b)?;
                m.groupoids.insert(b.name.clone(), g);
            }
            BlockKind::LeftAction | BlockKind::RightAction => {
                let (acting, on) = (gpd("acting")?, gpd("on")?);
                let left = b.kind == BlockKind::LeftAction;
                let (rho, act, restr) = action_tables(b, acting, on, left)?;
                let (an, on_n) = (required_ref(b, "acting")?.to_string(), required_ref(b, "on")?.to_string());
                if left {
                    let a = LeftAction::new(acting.clone(), on.clone(), &rho, &act, &restr).map_err(|e| elab(b.at, e.to_string()))?;
                    m.left_actions.insert(b.name.clone(), ActionDecl { acting: an, on: on_n, action: a });
                } else {
                    let a = RightAction::new(acting.clone(), on.clone(), &rho, &act, &restr).map_err(|e| elab(b.at, e.to_string()))?;
                    m.right_actions.insert(b.name.clone(), ActionDecl { acting: an, on: on_n, action: a });
                }
            }
            BlockKind::FellBundle => {
                let g = gpd("groupoid")?;
                let bundle = elaborate_bundle(b, g)?;
                let groupoid = required_ref(b, "groupoid")?.to_string();
                m.bundles.insert(b.name.clone(), BundleDecl { groupoid, bundle });
            }
            BlockKind::FellAction => {
                let (an, bn) = (required_ref(b, "action")?, required_ref(b, "bundle")?);
                let bd = m.bundles.get(bn).ok_or_else(|| diag(DiagKind::Reference, b.at, format!("unknown bundle `{bn}`")))?;
                let coords = CoordBundle::from_matrix(&bd.bundle).map_err(|e| elab(b.at, e.to_string()))?;
                let decl = if let Some(a) = m.left_actions.get(an) {
                    if a.on != bd.groupoid {
                        return Err(elab(b.at, format!("action `{an}` is on `{}` but bundle `{bn}` is over `{}`", a.on, bd.groupoid)));
                    }
                    let maps = fell_maps(b, &a.action.h, &a.action.x, true)?;
                    let fell = if maps.is_empty() {
                        FellLeftAction::identity(a.action.clone(), coords)
                    } else {
                        let mut t = HashMap::new();
                        for (at, h, x, e) in maps {
                            let y = a.action.act(h, x).ok_or_else(|| elab(at, "map given outside the action domain"))?;
                            t.insert((h, x), entries_to_mat(e, coords.fdim[y], coords.fdim[x], at)?);
                        }
                        if let Some((h, x)) = a.action.domain().find(|p| !t.contains_key(p)) {
                            return Err(elab(b.at, format!("`map {} {}` is not defined", a.action.h.label(h), a.action.x.label(x))));
                        }
                        FellLeftAction::new(a.action.clone(), coords, t)
                    }
                    .map_err(|e| elab(b.at, e.to_string()))?;
                    FellActionDecl::Left { action: an.to_string(), bundle: bn.to_string(), fell }
                } else if let Some(a) = m.right_actions.get(an) {
                    if a.on != bd.groupoid {
                        return Err(elab(b.at, format!("action `{an}` is on `{}` but bundle `{bn}` is over `{}`", a.on, bd.groupoid)));
                    }
                    let maps = fell_maps(b, &a.action.g, &a.action.x, false)?;
                    let fell = if maps.is_empty() {
                        FellRightAction::identity(a.action.clone(), coords)
                    } else {
                        let mut t = HashMap::new();
                        for (at, x, s, e) in maps {
                            let y = a.action.act(x, s).ok_or_else(|| elab(at, "map given outside the action domain"))?;
                            t.insert((x, s), entries_to_mat(e, coords.fdim[y], coords.fdim[x], at)?);
                        }
                        if let Some((x, s)) = a.action.domain().find(|p| !t.contains_key(p)) {
                            return Err(elab(b.at, format!("`map {} {}` is not defined", a.action.x.label(x), a.action.g.label(s))));
                        }
                        FellRightAction::new(a.action.clone(), coords, t)
                    }
                    .map_err(|e| elab(b.at, e.to_string()))?;
                    FellActionDecl::Right { action: an.to_string(), bundle: bn.to_string(), fell }
                } else {
                    return Err(diag(DiagKind::Reference, b.at, format!("unknown action `{an}`")));
                };
                m.fell_actions.insert(b.name.clone(), decl);
            }
            BlockKind::DrSystem => {
                m.dr_systems.insert(b.name.clone(), elaborate_dr(b)?);
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Emission from core objects

/// Element names for `g`: its labels when they are usable names, else `g0 g1 ...`.
fn element_names(g: &FiniteGroupoid) -> Vec<String> {
    let labels = g.labels();
    let unique = labels.iter().collect::<HashSet<_>>().len() == labels.len();
    if unique && labels.iter().all(|l| is_name(l)) {
        labels.to_vec()
    } else {
        (0..g.len()).map(|i| format!("g{i}")).collect()
    }
}

pub fn groupoid_block(name: &str, g: &FiniteGroupoid) -> Block {
    let names = element_names(g);
    let mut b = Block::new(BlockKind::Groupoid, name);
    b.stmts.push(Stmt::Elements(names.clone()));
    b.stmts.push(Stmt::Units(g.units().iter().map(|&u| names[u].clone()).collect()));
    for a in g.elements().filter(|&a| !g.is_unit(a)) {
        b.stmts.push(Stmt::Src(names[a].clone(), names[g.src(a)].clone()));
        b.stmts.push(Stmt::Rng(names[a].clone(), names[g.rng(a)].clone()));
        b.stmts.push(Stmt::Inv(names[a].clone(), names[g.inv(a)].clone()));
    }
    for (a, c, d) in g.products() {
        if !g.is_unit(a) && !g.is_unit(c) {
            b.stmts.push(Stmt::Mul(names[a].clone(), names[c].clone(), names[d].clone()));
        }
    }
    b
}

pub fn left_action_block(name: &str, acting: &str, on: &str, a: &LeftAction) -> Block {
    let (hn, xn) = (element_names(&a.h), element_names(&a.x));
    let mut b = Block::new(BlockKind::LeftAction, name);
    b.stmts.push(Stmt::Ref("acting".into(), acting.into()));
    b.stmts.push(Stmt::Ref("on".into(), on.into()));
    for &u in a.x.units() {
        b.stmts.push(Stmt::Rho0(xn[u].clone(), hn[a.rho0(u)].clone()));
    }
    let dom: Vec<(Id, Id)> = a.domain().collect();
    for &(h, x) in &dom {
        b.stmts.push(Stmt::Act(hn[h].clone(), xn[x].clone(), xn[a.act(h, x).unwrap()].clone()));
    }
    for &(h, x) in &dom {
        b.stmts.push(Stmt::Restr(hn[h].clone(), xn[x].clone(), hn[a.restr(h, x).unwrap()].clone()));
    }
    b
}

pub fn right_action_block(name: &str, acting: &str, on: &str, a: &RightAction) -> Block {
    let (gn, xn) = (element_names(&a.g), element_names(&a.x));
    let mut b = Block::new(BlockKind::RightAction, name);
    b.stmts.push(Stmt::Ref("acting".into(), acting.into()));
    b.stmts.push(Stmt::Ref("on".into(), on.into()));
    for &u in a.x.units() {
        b.stmts.push(Stmt::Rho0(xn[u].clone(), gn[a.sigma0(u)].clone()));
    }
    let dom: Vec<(Id, Id)> = a.domain().collect();
    for &(x, t) in &dom {
        b.stmts.push(Stmt::Act(xn[x].clone(), gn[t].clone(), xn[a.act(x, t).unwrap()].clone()));
    }
    for &(x, t) in &dom {
        b.stmts.push(Stmt::Restr(xn[x].clone(), gn[t].clone(), gn[a.restr(x, t).unwrap()].clone()));
    }
    b
}

fn row_major(m: &CMat) -> Entries {
    (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect()
}

pub fn bundle_block(name: &str, groupoid: &str, fb: &FellBundle) -> Block {
    let g = &fb.base;
    let names = element_names(g);
    let mut b = Block::new(BlockKind::FellBundle, name);
    b.stmts.push(Stmt::Ref("groupoid".into(), groupoid.into()));
    for (&u, &d) in fb.dims() {
        b.stmts.push(Stmt::Dim(names[u].clone(), d));
    }
    for x in g.elements() {
        b.stmts.push(Stmt::Basis(names[x].clone(), fb.basis(x).iter().map(row_major).collect()));
    }
    b
}

pub fn fell_left_action_block(name: &str, action: &str, bundle: &str, fa: &FellLeftAction) -> Block {
    let (hn, xn) = (element_names(&fa.action.h), element_names(&fa.action.x));
    let mut b = Block::new(BlockKind::FellAction, name);
    b.stmts.push(Stmt::Ref("action".into(), action.into()));
    b.stmts.push(Stmt::Ref("bundle".into(), bundle.into()));
    for (h, x) in fa.action.domain() {
        b.stmts.push(Stmt::Map(hn[h].clone(), xn[x].clone(), row_major(fa.map(h, x))));
    }
    b
}

pub fn dr_block(name: &str, sys: &StarCommutingSystem) -> Block {
    let names: Vec<String> = (0..sys.n).map(|i| i.to_string()).collect();
    let cycles = |m: &[usize]| -> Vec<Vec<String>> {
        let mut seen = vec![false; m.len()];
        let mut out = Vec::new();
        for s in 0..m.len() {
            if seen[s] || m[s] == s {
                continue;
            }
            let mut c = Vec::new();
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                c.push(names[p].clone());
                p = m[p];
            }
            out.push(c);
        }
        out
    };
    let mut b = Block::new(BlockKind::DrSystem, name);
    b.stmts.push(Stmt::Elements(names.clone()));
    b.stmts.push(Stmt::Perm("S".into(), cycles(&sys.s)));
    b.stmts.push(Stmt::Perm("T".into(), cycles(&sys.t)));
    b
}

// ---------------------------------------------------------------------------
// Built-in documents

/// Names accepted by `gpdkit example`.
pub const EXAMPLE_DOCUMENTS: [&str; 5] = ["s4", "semidirect", "skew", "dr-z6", "crossed"];

/// The built-in document called `name`.
pub fn example_document(name: &str) -> Option<Document> {
    use crate::fixtures::{s4_example, semidirect_two_sided, skew_mod_two};
    let blocks = match name {
        "s4" => {
            let s = s4_example();
            vec![groupoid_block("H", &s.h), groupoid_block("X", &s.x), left_action_block("A", "H", "X", &s.action)]
        }
        "semidirect" => {
            let (l, r) = semidirect_two_sided();
            vec![
                groupoid_block("H", &l.h),
                groupoid_block("G", &r.g),
                groupoid_block("X", &l.x),
                left_action_block("L", "H", "X", &l),
                right_action_block("R", "G", "X", &r),
            ]
        }
        "skew" => {
            let (g, h, c) = skew_mod_two();
            let a = crate::construct::skew_ss_action(&g, &h, &c).ok()?;
            vec![groupoid_block("H", &a.h), groupoid_block("X", &a.x), left_action_block("A", "H", "X", &a)]
        }
        "dr-z6" => vec![dr_block("Z6", &crate::dr::z6_system())],
        "crossed" => {
            let sys = crate::fell::examples::CrossedProductSystem::new().ok()?;
            let fa = sys.left_action().ok()?;
            let b = sys.x_bundle().ok()?;
            vec![
                groupoid_block("H", &sys.fx.h),
                groupoid_block("X", &sys.fx.x),
                left_action_block("A", "H", "X", &sys.fx.action),
                bundle_block("B", "X", &b),
                fell_left_action_block("BA", "A", "B", &fa),
            ]
        }
        _ => return None,
    };
    Some(Document { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z2: &str = "\
# the group of order two
[groupoid Z2]
elements = e g
units = e
inv g = g
mul g g = e
";

    #[test]
    fn empty_text_is_an_empty_document() {
        assert_eq!(parse("").unwrap(), Document::default());
        assert_eq!(parse("  # only a comment\n\n").unwrap(), Document::default());
    }

    #[test]
    fn z2_parses_and_elaborates() {
        let doc = parse(Z2).unwrap();
        assert_eq!(doc.blocks.len(), 1);
        let m = elaborate(&doc).unwrap();
        let g = &m.groupoids["Z2"];
        assert_eq!(g.len(), 2);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn duplicate_block_name_is_a_reference_error_at_the_second() {
        let text = format!("{Z2}\n[groupoid Z2]\n");
        let d = parse(&text).unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
        assert_eq!((d.line, d.col), (8, 11));
    }

    #[test]
    fn duplicate_element_is_a_reference_error() {
        let d = parse("[groupoid A]\nelements = a b a\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
        assert_eq!((d.line, d.col), (2, 16));
    }

    #[test]
    fn duplicate_statement_is_a_reference_error() {
        let d = parse("[groupoid A]\nelements = a b\nunits = a b\ninv a = a\ninv a = b\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
        assert_eq!(d.line, 5);
    }

    #[test]
    fn unknown_element_is_a_reference_error() {
        let d = parse("[groupoid A]\nelements = a\nunits = a\nmul a a = b\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
        assert_eq!((d.line, d.col), (4, 11));
    }

    #[test]
    fn arity_errors() {
        let d = parse("[groupoid A]\nelements = a\nmul a = a\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Arity);
        let d = parse("[groupoid A]\nelements = a\nsrc a = a a\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Arity);
        let d = parse("[groupoid]\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Arity);
    }

    #[test]
    fn lexical_errors() {
        let d = parse("[groupoid A\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Lexical);
        let d = parse("[groupoid A]\nelements a b\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Lexical);
        let text = "[groupoid X]\nelements = u\nunits = u\n[fell-bundle B]\ngroupoid = X\ndim u = 1\nbasis u = [[1,0;2]]\n";
        let d = parse(text).unwrap_err();
        assert_eq!(d.kind, DiagKind::Lexical);
        assert_eq!(d.line, 7);
        let d = parse("[groupoid A]\nelements = a\ndim a = x\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
    }

    #[test]
    fn statement_in_the_wrong_block() {
        let d = parse("[dr-system D]\nelements = 0\nmul 0 0 = 0\n").unwrap_err();
        assert_eq!(d.kind, DiagKind::Reference);
    }

    #[test]
    fn bundle_and_action_round_trip() {
        let text = "\
[groupoid X]
elements = u v a b
units = u v
src a = u
rng a = v
inv a = b
src b = v
rng b = u
inv b = a
mul a b = v
mul b a = u
[fell-bundle B]
groupoid = X
dim u = 1
dim v = 1
basis u = [[1,0]]
basis v = [[1,0]]
basis a = [[0.5,-1.25]]
basis b = [[1,0]]
";
        let doc = parse(text).unwrap();
        assert_eq!(parse(&print(&doc)).unwrap(), doc);
        let m = elaborate(&doc).unwrap();
        assert_eq!(m.bundles["B"].bundle.basis(2)[0][(0, 0)], Complex64::new(0.5, -1.25));
    }

    #[test]
    fn dr_block_round_trips() {
        let doc = example_document("dr-z6").unwrap();
        let text = print(&doc);
        assert!(text.contains("perm S = (0 2 4)(1 3 5)"));
        let back = parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(elaborate(&back).unwrap().dr_systems["Z6"], crate::dr::z6_system());
    }

    #[test]
    fn every_example_round_trips_and_elaborates() {
        for name in EXAMPLE_DOCUMENTS {
            let doc = example_document(name).unwrap();
            let back = parse(&print(&doc)).unwrap_or_else(|d| panic!("{name}: {d}"));
            assert_eq!(back, doc, "{name}");
            elaborate(&back).unwrap_or_else(|d| panic!("{name}: {d}"));
        }
    }

    #[test]
    fn shipped_s4_fixture_parses_to_three_blocks() {
        let doc = parse(include_str!("../../../fixtures/s4.gpd")).unwrap();
        assert_eq!(doc.blocks.len(), 3);
        assert_eq!(doc, example_document("s4").unwrap());
    }

    #[test]
    fn s4_document_reproduces_the_fixture() {
        let m = elaborate(&example_document("s4").unwrap()).unwrap();
        let s = crate::fixtures::s4_example();
        assert_eq!(m.left_actions["A"].action, s.action);
    }
}
