//! Declaration discovery for the identifier channel.
//!
//! This is a heuristic parser for a single-file C subset. It recognises
//! declarations at file scope, in function bodies and in `for` initialisers,
//! records every declared name in a [`SymbolTable`] keyed by name and scope,
//! and selects local and static variables as carriers. Anything it does not
//! understand is left alone: unrecognised constructs only ever cost capacity.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use super::lexer::{Token, TokenKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    LocalVar,
    StaticVar,
    FunctionName,
    Parameter,
    ExternName,
    Macro,
    Other,
}

pub type ScopeId = u32;

pub const FILE_SCOPE: ScopeId = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub scope: ScopeId,
    pub kind: SymbolKind,
    /// Token index of the first declarator naming this symbol.
    pub decl_token: usize,
    pub decl_offset: usize,
    /// Token indices over which the declaration is visible.
    pub region: Range<usize>,
    pub rename: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    entries: Vec<Symbol>,
    index: HashMap<(String, ScopeId), usize>,
}

impl SymbolTable {
    pub fn get(&self, name: &str, scope: ScopeId) -> Option<&Symbol> {
        self.index
            .get(&(name.to_owned(), scope))
            .map(|&i| &self.entries[i])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.entries[id]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn set_rename(&mut self, id: usize, rename: String) {
        self.entries[id].rename = Some(rename);
    }

    /// Adds a declaration, merging redeclarations of the same name in the
    /// same scope. A merge with a different kind demotes the entry to
    /// [`SymbolKind::Other`].
    fn declare(&mut self, key: String, symbol: Symbol) -> usize {
        if let Some(&id) = self.index.get(&(key.clone(), symbol.scope)) {
            let existing = &mut self.entries[id];
            if existing.kind != symbol.kind {
                existing.kind = SymbolKind::Other;
            }
            existing.region.end = existing.region.end.max(symbol.region.end);
            return id;
        }
        let id = self.entries.len();
        self.index.insert((key, symbol.scope), id);
        self.entries.push(symbol);
        id
    }
}

/// A variable selected to carry one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateVar {
    /// Index into [`SymbolTable::symbols`].
    pub symbol: usize,
    pub declaration_offset: usize,
    pub ordinal: usize,
}

/// Whether names are taken literally (cover analysis) or with one trailing
/// underscore removed (stego analysis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameMode {
    Cover,
    Stego,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub table: SymbolTable,
    pub candidates: Vec<CandidateVar>,
    /// Ranges of tokens inside struct, union and enum bodies.
    pub opaque: Vec<Range<usize>>,
    /// Every identifier spelled anywhere in the source, directives included.
    pub all_names: HashSet<String>,
}

const TYPE_KEYWORDS: &[&str] = &[
    "void",
    "char",
    "short",
    "int",
    "long",
    "float",
    "double",
    "signed",
    "unsigned",
    "_Bool",
    "_Complex",
    "_Imaginary",
];
const QUALIFIERS: &[&str] = &[
    "const",
    "volatile",
    "restrict",
    "_Atomic",
    "inline",
    "_Noreturn",
];
const WELL_KNOWN_TYPES: &[&str] = &["FILE", "DIR", "bool", "va_list", "jmp_buf"];
const ATTRIBUTE_WORDS: &[&str] = &[
    "__attribute__",
    "__declspec",
    "__extension__",
    "__restrict",
    "__inline",
];

fn identifiers_in(text: &[u8]) -> impl Iterator<Item = &[u8]> {
    text.split(|b| !(b.is_ascii_alphanumeric() || *b == b'_'))
        .filter(|w| {
            w.first()
                .is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_')
        })
}

fn as_str(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[derive(Default, Clone, Copy)]
struct Storage {
    is_static: bool,
    is_extern: bool,
    is_typedef: bool,
}

struct ParamList {
    /// Significant-token index of the closing `)`.
    close: usize,
    names: Vec<usize>,
}

struct Declarator {
    name: usize,
    function: Option<ParamList>,
    /// Parameter lists of nested function-pointer types.
    nested_params: Vec<ParamList>,
}

struct Declaration {
    storage: Storage,
    declarators: Vec<Declarator>,
    /// Enumerator names declared by an `enum { ... }` specifier.
    enumerators: Vec<usize>,
    /// Significant index just after the declaration.
    end: usize,
    /// `{` and `}` of a function body.
    body: Option<(usize, usize)>,
}

struct Parser<'t, 'a> {
    tokens: &'t [Token<'a>],
    /// Indices of significant tokens (no whitespace, comments or directives).
    sig: Vec<usize>,
    /// Matching bracket for each significant index.
    matching: Vec<Option<usize>>,
    mode: NameMode,
    table: SymbolTable,
    typedefs: HashSet<String>,
    opaque: Vec<Range<usize>>,
    next_scope: ScopeId,
}

impl<'t, 'a> Parser<'t, 'a> {
    fn tok(&self, k: usize) -> Option<&Token<'a>> {
        self.sig.get(k).map(|&t| &self.tokens[t])
    }

    fn is(&self, k: usize, text: &str) -> bool {
        self.tok(k).is_some_and(|t| t.is(text))
    }

    fn kind(&self, k: usize) -> Option<TokenKind> {
        self.tok(k).map(|t| t.kind)
    }

    fn text(&self, k: usize) -> &'a [u8] {
        self.tok(k).map_or(b"", |t| t.text)
    }

    /// Name as used for comparisons in the current mode.
    fn norm(&self, name: &[u8]) -> String {
        match (self.mode, name.strip_suffix(b"_")) {
            (NameMode::Stego, Some(stripped)) if !stripped.is_empty() => as_str(stripped),
            _ => as_str(name),
        }
    }

    fn new_scope(&mut self) -> ScopeId {
        self.next_scope += 1;
        self.next_scope
    }

    fn is_type_name(&self, k: usize) -> bool {
        let name = self.norm(self.text(k));
        self.typedefs.contains(&name)
            || WELL_KNOWN_TYPES.contains(&name.as_str())
            || name.ends_with("_t")
    }

    fn tok_index(&self, k: usize) -> usize {
        self.sig.get(k).copied().unwrap_or(self.tokens.len())
    }

    fn declare(&mut self, k: usize, scope: ScopeId, kind: SymbolKind, region_end: usize) -> usize {
        let t = self.tok_index(k);
        let key = self.norm(self.text(k));
        self.table.declare(
            key,
            Symbol {
                name: as_str(self.text(k)),
                scope,
                kind,
                decl_token: t,
                decl_offset: self.tokens[t].span.start,
                region: t..region_end.max(t + 1),
                rename: None,
            },
        )
    }

    /// Skips `__attribute__((...))` style noise.
    fn skip_attributes(&self, mut k: usize) -> usize {
        while self
            .tok(k)
            .is_some_and(|t| ATTRIBUTE_WORDS.iter().any(|w| t.is(w)))
        {
            k += 1;
            if self.is(k, "(") {
                match self.matching[k] {
                    Some(close) => k = close + 1,
                    None => return k,
                }
            }
        }
        k
    }

    /// Parses declaration specifiers. Returns the storage flags, the index
    /// after the specifiers, and any enumerator names.
    fn specifiers(
        &mut self,
        mut k: usize,
        in_params: bool,
    ) -> Option<(Storage, usize, Vec<usize>)> {
        let mut storage = Storage::default();
        let mut has_type = false;
        let mut enumerators = Vec::new();
        loop {
            k = self.skip_attributes(k);
            let Some(tok) = self.tok(k) else { break };
            match tok.kind {
                TokenKind::Keyword => {
                    let word = tok.text;
                    if word == b"static" {
                        storage.is_static = true;
                    } else if word == b"extern" {
                        storage.is_extern = true;
                    } else if word == b"typedef" {
                        storage.is_typedef = true;
                    } else if matches!(word, b"auto" | b"register" | b"_Thread_local")
                        || QUALIFIERS.iter().any(|q| q.as_bytes() == word)
                    {
                    } else if TYPE_KEYWORDS.iter().any(|q| q.as_bytes() == word) {
                        has_type = true;
                    } else if matches!(word, b"struct" | b"union" | b"enum") {
                        let is_enum = word == b"enum";
                        k = self.skip_attributes(k + 1);
                        if self.kind(k) == Some(TokenKind::Identifier) {
                            k += 1;
                        }
                        if self.is(k, "{") {
                            let close = self.matching[k]?;
                            self.opaque
                                .push(self.tok_index(k)..self.tok_index(close) + 1);
                            if is_enum {
                                enumerators.extend(self.enumerator_names(k, close));
                            }
                            k = close;
                        } else {
                            k -= 1;
                        }
                        has_type = true;
                    } else {
                        break;
                    }
                    k += 1;
                }
                TokenKind::Identifier if !has_type => {
                    let next_is_ident = self.kind(k + 1) == Some(TokenKind::Identifier)
                        && !ATTRIBUTE_WORDS.iter().any(|w| self.is(k + 1, w));
                    if in_params || self.is_type_name(k) || next_is_ident {
                        has_type = true;
                        k += 1;
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        has_type.then_some((storage, k, enumerators))
    }

    fn enumerator_names(&self, open: usize, close: usize) -> Vec<usize> {
        let mut names = Vec::new();
        let mut k = open + 1;
        let mut expect_name = true;
        while k < close {
            if let Some(c) = self.matching[k].filter(|_| self.is(k, "(") || self.is(k, "[")) {
                k = c + 1;
                continue;
            }
            if self.is(k, ",") {
                expect_name = true;
            } else if expect_name && self.kind(k) == Some(TokenKind::Identifier) {
                names.push(k);
                expect_name = false;
            }
            k += 1;
        }
        names
    }

    /// Parses one (possibly abstract) declarator.
    fn declarator(
        &mut self,
        mut k: usize,
        allow_abstract: bool,
    ) -> Option<(Option<Declarator>, usize)> {
        while self.is(k, "*")
            || self
                .tok(k)
                .is_some_and(|t| QUALIFIERS.iter().any(|q| t.is(q)))
        {
            k += 1;
        }
        k = self.skip_attributes(k);

        let mut result: Option<Declarator> = None;
        let mut direct_name = false;
        if self.kind(k) == Some(TokenKind::Identifier) {
            result = Some(Declarator {
                name: k,
                function: None,
                nested_params: Vec::new(),
            });
            direct_name = true;
            k += 1;
        } else if self.is(k, "(") && (self.is(k + 1, "*") || self.is(k + 1, "(")) {
            let close = self.matching[k]?;
            let (inner, after) = self.declarator(k + 1, allow_abstract)?;
            if after != close {
                return None;
            }
            result = inner;
            k = close + 1;
        } else if !allow_abstract {
            return None;
        }

        let mut first_suffix = true;
        loop {
            if self.is(k, "[") {
                k = self.matching[k]? + 1;
            } else if self.is(k, "(") {
                let close = self.matching[k]?;
                let params = self.param_list(k, close)?;
                match result.as_mut() {
                    Some(d) if direct_name && first_suffix => d.function = Some(params),
                    Some(d) => d.nested_params.push(params),
                    None => {}
                }
                k = close + 1;
            } else {
                break;
            }
            first_suffix = false;
        }
        Some((result, self.skip_attributes(k)))
    }

    fn param_list(&mut self, open: usize, close: usize) -> Option<ParamList> {
        let mut names = Vec::new();
        let mut k = open + 1;
        while k < close {
            if self.is(k, "...") {
                k += 1;
                continue;
            }
            let (_, after_specs, _) = self.specifiers(k, true)?;
            let (decl, after) = self.declarator(after_specs, true)?;
            if let Some(d) = decl {
                names.push(d.name);
            }
            k = after;
            if self.is(k, ",") {
                k += 1;
            } else if k != close {
                return None;
            }
        }
        Some(ParamList { close, names })
    }

    /// Skips an initializer up to the `,` or `;` that ends it.
    fn skip_initializer(&self, mut k: usize, limit: usize) -> usize {
        while k < limit {
            if self.is(k, ",") || self.is(k, ";") {
                return k;
            }
            if self.is(k, "(") || self.is(k, "[") || self.is(k, "{") {
                match self.matching[k] {
                    Some(c) => k = c + 1,
                    None => return limit,
                }
            } else {
                k += 1;
            }
        }
        limit
    }

    fn declaration(&mut self, k: usize, limit: usize, allow_body: bool) -> Option<Declaration> {
        let (storage, mut k, enumerators) = self.specifiers(k, false)?;
        let mut declarators = Vec::new();
        if self.is(k, ";") {
            return Some(Declaration {
                storage,
                declarators,
                enumerators,
                end: k + 1,
                body: None,
            });
        }
        loop {
            let (decl, after) = self.declarator(k, false)?;
            let decl = decl?;
            k = after;
            let is_function = decl.function.is_some();
            declarators.push(decl);
            if is_function && allow_body && declarators.len() == 1 && self.is(k, "{") {
                let close = self.matching[k]?;
                return Some(Declaration {
                    storage,
                    declarators,
                    enumerators,
                    end: close + 1,
                    body: Some((k, close)),
                });
            }
            if self.is(k, "=") {
                k = self.skip_initializer(k + 1, limit);
            }
            if self.is(k, ",") {
                k += 1;
            } else if self.is(k, ";") {
                return Some(Declaration {
                    storage,
                    declarators,
                    enumerators,
                    end: k + 1,
                    body: None,
                });
            } else {
                return None;
            }
        }
    }

    /// Records the names introduced by a declaration. `region_end` is the
    /// token index where their visibility ends.
    fn record(&mut self, decl: &Declaration, scope: ScopeId, region_end: usize, file_scope: bool) {
        for &e in &decl.enumerators {
            self.declare(e, scope, SymbolKind::Other, region_end);
        }
        for d in &decl.declarators {
            for params in &d.nested_params {
                self.record_prototype(params);
            }
            if decl.storage.is_typedef {
                let name = self.norm(self.text(d.name));
                self.typedefs.insert(name);
                self.declare(d.name, scope, SymbolKind::Other, region_end);
                continue;
            }
            let kind = if d.function.is_some() {
                SymbolKind::FunctionName
            } else if decl.storage.is_extern {
                SymbolKind::ExternName
            } else if decl.storage.is_static {
                SymbolKind::StaticVar
            } else if file_scope {
                SymbolKind::Other
            } else {
                SymbolKind::LocalVar
            };
            self.declare(d.name, scope, kind, region_end);
            if let (Some(params), None) = (&d.function, decl.body) {
                self.record_prototype(params);
            }
        }
    }

    fn record_prototype(&mut self, params: &ParamList) {
        let scope = self.new_scope();
        let end = self.tok_index(params.close);
        for &p in &params.names {
            self.declare(p, scope, SymbolKind::Parameter, end);
        }
    }

    fn skip_statement(&self, mut k: usize, limit: usize) -> usize {
        while k < limit {
            if self.is(k, ";") {
                return k + 1;
            }
            if self.is(k, "(") || self.is(k, "[") || self.is(k, "{") {
                match self.matching[k] {
                    Some(c) => k = c + 1,
                    None => return limit,
                }
            } else if self.is(k, "}") {
                return k;
            } else {
                k += 1;
            }
        }
        limit
    }

    fn file(&mut self) {
        let limit = self.sig.len();
        let mut k = 0;
        while k < limit {
            if self.is(k, ";") {
                k += 1;
                continue;
            }
            match self.declaration(k, limit, true) {
                Some(decl) => {
                    let end = self.tokens.len();
                    self.record(&decl, FILE_SCOPE, end, true);
                    if let Some((open, close)) = decl.body {
                        let params = decl.declarators[0].function.as_ref();
                        let fn_scope = self.new_scope();
                        let body_end = self.tok_index(close);
                        for &p in params.map(|p| p.names.as_slice()).unwrap_or_default() {
                            self.declare(p, fn_scope, SymbolKind::Parameter, body_end);
                        }
                        self.block(open, close);
                    }
                    k = decl.end;
                }
                None => {
                    let next = self.skip_statement(k, limit);
                    // a stray `}` makes no progress
                    k = next.max(k + 1);
                }
            }
        }
    }

    /// Walks the statements between `open` (`{`) and `close` (`}`).
    fn block(&mut self, open: usize, close: usize) {
        let scope = self.new_scope();
        let mut k = open + 1;
        while k < close {
            k = self.statement(k, close, scope);
        }
    }

    /// Parses one statement starting at `k`; returns the index after it.
    fn statement(&mut self, k: usize, limit: usize, scope: ScopeId) -> usize {
        let next = self.statement_inner(k, limit, scope);
        next.max(k + 1).min(limit.max(k + 1))
    }

    fn statement_inner(&mut self, k: usize, limit: usize, scope: ScopeId) -> usize {
        let tokens: &'t [Token<'a>] = self.tokens;
        let Some(tok) = self.sig.get(k).map(|&t| &tokens[t]) else {
            return limit;
        };
        if tok.is("{") {
            let Some(close) = self.matching[k] else {
                return limit;
            };
            self.block(k, close);
            return close + 1;
        }
        if tok.is(";") {
            return k + 1;
        }
        if tok.kind == TokenKind::Keyword {
            match tok.text {
                b"if" | b"while" | b"switch" => {
                    if !self.is(k + 1, "(") {
                        return self.skip_statement(k, limit);
                    }
                    let Some(cond_close) = self.matching[k + 1] else {
                        return limit;
                    };
                    let mut after = self.statement(cond_close + 1, limit, scope);
                    if tok.is("if") && self.is(after, "else") {
                        after = self.statement(after + 1, limit, scope);
                    }
                    return after;
                }
                b"else" => return self.statement(k + 1, limit, scope),
                b"for" => return self.for_statement(k, limit),
                b"do" => {
                    let after = self.statement(k + 1, limit, scope);
                    return self.skip_statement(after, limit);
                }
                b"case" | b"default" => {
                    let mut j = k + 1;
                    while j < limit && !self.is(j, ":") {
                        j += 1;
                    }
                    return j + 1;
                }
                _ => {}
            }
        }
        if tok.kind == TokenKind::Identifier && self.is(k + 1, ":") {
            // label
            return k + 2;
        }
        if let Some(decl) = self.declaration(k, limit, false) {
            let region_end = self.tok_index(limit);
            self.record(&decl, scope, region_end, false);
            return decl.end;
        }
        self.skip_statement(k, limit)
    }

    fn for_statement(&mut self, k: usize, limit: usize) -> usize {
        if !self.is(k + 1, "(") {
            return self.skip_statement(k, limit);
        }
        let Some(head_close) = self.matching[k + 1] else {
            return limit;
        };
        let scope = self.new_scope();
        let init = self.declaration(k + 2, head_close, false);
        let end = self.statement(head_close + 1, limit, scope);
        if let Some(decl) = init {
            let region_end = self.tok_index(end);
            self.record(&decl, scope, region_end, false);
        }
        end
    }
}

fn bracket_matches(tokens: &[Token], sig: &[usize]) -> Vec<Option<usize>> {
    let mut matching = vec![None; sig.len()];
    let mut stack: Vec<(usize, u8)> = Vec::new();
    for (k, &t) in sig.iter().enumerate() {
        let tok = &tokens[t];
        if tok.kind != TokenKind::Punct || tok.text.len() != 1 {
            continue;
        }
        match tok.text[0] {
            open @ (b'(' | b'[' | b'{') => stack.push((k, open)),
            close @ (b')' | b']' | b'}') => {
                let want = match close {
                    b')' => b'(',
                    b']' => b'[',
                    _ => b'{',
                };
                // unwind past mismatched openers
                while let Some((o, kind)) = stack.pop() {
                    if kind == want {
                        matching[o] = Some(k);
                        matching[k] = Some(o);
                        break;
                    }
                }
            }
            _ => {}
        }
    }
    matching
}

/// Finds declarations and selects carrier variables.
///
/// In [`NameMode::Cover`] a carrier whose name already ends in `_` makes the
/// cover ambiguous and is rejected. In [`NameMode::Stego`] one trailing `_`
/// is ignored in every name so a stego file yields the same carriers as its
/// cover.
pub fn find_candidates(tokens: &[Token], mode: NameMode) -> Result<Analysis> {
    let sig: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_trivia() && t.kind != TokenKind::Directive)
        .map(|(i, _)| i)
        .collect();
    let matching = bracket_matches(tokens, &sig);

    let mut parser = Parser {
        tokens,
        sig,
        matching,
        mode,
        table: SymbolTable::default(),
        typedefs: HashSet::new(),
        opaque: Vec::new(),
        next_scope: FILE_SCOPE,
    };

    let mut all_names = HashSet::new();
    let mut directive_names = HashSet::new();
    for (i, tok) in tokens.iter().enumerate() {
        match tok.kind {
            TokenKind::Identifier => {
                all_names.insert(as_str(tok.text));
            }
            TokenKind::Directive => {
                for word in identifiers_in(&tok.text[1..]) {
                    all_names.insert(as_str(word));
                    directive_names.insert(parser.norm(word));
                }
                if let Some(name) = defined_macro(tok.text) {
                    let key = parser.norm(name);
                    parser.table.declare(
                        key,
                        Symbol {
                            name: as_str(name),
                            scope: FILE_SCOPE,
                            kind: SymbolKind::Macro,
                            decl_token: i,
                            decl_offset: tok.span.start,
                            region: i..tokens.len(),
                            rename: None,
                        },
                    );
                }
            }
            _ => {}
        }
    }

    parser.file();

    let Parser { table, opaque, .. } = parser;
    let mut candidates: Vec<CandidateVar> = table
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.kind, SymbolKind::LocalVar | SymbolKind::StaticVar))
        .filter(|(_, s)| {
            let key = match mode {
                NameMode::Cover => s.name.clone(),
                NameMode::Stego => s
                    .name
                    .strip_suffix('_')
                    .filter(|n| !n.is_empty())
                    .unwrap_or(&s.name)
                    .to_owned(),
            };
            !directive_names.contains(&key)
        })
        .map(|(id, s)| CandidateVar {
            symbol: id,
            declaration_offset: s.decl_offset,
            ordinal: 0,
        })
        .collect();
    candidates.sort_by_key(|c| c.declaration_offset);
    for (ordinal, c) in candidates.iter_mut().enumerate() {
        c.ordinal = ordinal;
    }

    if mode == NameMode::Cover {
        if let Some(bad) = candidates
            .iter()
            .map(|c| table.symbol(c.symbol))
            .find(|s| s.name.ends_with('_'))
        {
            return Err(Error::AmbiguousCover {
                reason: format!(
                    "variable `{}` at offset {} already ends with '_'",
                    bad.name, bad.decl_offset
                ),
            });
        }
    }

    Ok(Analysis {
        table,
        candidates,
        opaque,
        all_names,
    })
}

/// Name defined by a `#define` directive.
fn defined_macro(directive: &[u8]) -> Option<&[u8]> {
    let mut words = identifiers_in(&directive[1..]);
    match words.next() {
        Some(b"define") => words.next(),
        _ => None,
    }
}

impl Analysis {
    /// Token indices that refer to the candidate's variable.
    pub fn occurrences(&self, tokens: &[Token], candidate: &CandidateVar) -> Vec<usize> {
        let symbol = self.table.symbol(candidate.symbol);
        let shadows: Vec<&Range<usize>> = self
            .table
            .symbols()
            .iter()
            .filter(|s| {
                s.name == symbol.name
                    && s.decl_token != symbol.decl_token
                    && s.kind != SymbolKind::Macro
                    && s.region.start > symbol.region.start
                    && s.region.start < symbol.region.end
            })
            .map(|s| &s.region)
            .collect();

        let prev_sig = |i: usize| {
            tokens[..i]
                .iter()
                .rev()
                .find(|t| !t.is_trivia() && t.kind != TokenKind::Directive)
        };
        let next_sig = |i: usize| {
            tokens[i + 1..]
                .iter()
                .find(|t| !t.is_trivia() && t.kind != TokenKind::Directive)
        };

        symbol
            .region
            .clone()
            .filter(|&i| {
                let t = &tokens[i];
                t.kind == TokenKind::Identifier && t.text == symbol.name.as_bytes()
            })
            .filter(|i| !self.opaque.iter().any(|r| r.contains(i)))
            .filter(|i| !shadows.iter().any(|r| r.contains(i)))
            .filter(|&i| {
                let prev = prev_sig(i);
                let member = prev.is_some_and(|p| p.is(".") || p.is("->"));
                let goto = prev.is_some_and(|p| p.is("goto"));
                let label = next_sig(i).is_some_and(|n| n.is(":"))
                    && prev.is_none_or(|p| p.is(";") || p.is("{") || p.is("}"));
                !(member || goto || label)
            })
            .collect()
    }

    pub fn candidate_name(&self, candidate: &CandidateVar) -> &str {
        &self.table.symbol(candidate.symbol).name
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ident::lexer::lex;

    fn names(src: &str) -> Vec<String> {
        let toks = lex(src.as_bytes()).unwrap();
        let a = find_candidates(&toks, NameMode::Cover).unwrap();
        a.candidates
            .iter()
            .map(|c| a.candidate_name(c).to_owned())
            .collect()
    }

    fn kind_of(src: &str, name: &str) -> SymbolKind {
        let toks = lex(src.as_bytes()).unwrap();
        let a = find_candidates(&toks, NameMode::Cover).unwrap();
        a.table
            .symbols()
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.kind)
            .unwrap()
    }

    #[test]
    fn minimal_program() {
        let src = "int main(){ int var; }";
        assert_eq!(names(src), vec!["var"]);
        assert_eq!(kind_of(src, "main"), SymbolKind::FunctionName);
        assert_eq!(kind_of(src, "var"), SymbolKind::LocalVar);
    }

    #[test]
    fn extern_and_static() {
        let src = "extern int g; static int s;";
        assert_eq!(names(src), vec!["s"]);
        assert_eq!(kind_of(src, "g"), SymbolKind::ExternName);
        assert_eq!(kind_of(src, "s"), SymbolKind::StaticVar);
        assert_eq!(
            names("int global; static int x(void);"),
            Vec::<String>::new()
        );
    }

    #[test]
    fn trailing_underscore_is_ambiguous() {
        let toks = lex(b"int main(){ int v_; }").unwrap();
        let err = find_candidates(&toks, NameMode::Cover).unwrap_err();
        assert_eq!(err.code(), "E_AMBIGUOUS_COVER");
        // the same text read as stego is fine
        assert!(find_candidates(&toks, NameMode::Stego).is_ok());
        // non-carriers may end in '_'
        assert_eq!(
            names("extern int e_; int f_(int p_) { int ok; }"),
            vec!["ok"]
        );
    }

    #[test]
    fn parameters_and_macros_are_not_candidates() {
        let src = "#define LIMIT 3\nint f(int a, char *b) { int LIMIT2, c = a; return c; }";
        assert_eq!(names(src), vec!["LIMIT2", "c"]);
        assert_eq!(kind_of(src, "a"), SymbolKind::Parameter);
        assert_eq!(kind_of(src, "LIMIT"), SymbolKind::Macro);
        // a local whose name appears in a directive could be referenced by it
        assert_eq!(
            names("#define GET() n\nint f(void){ int n = 1; return GET(); }"),
            Vec::<String>::new()
        );
    }

    #[test]
    fn declaration_forms() {
        let src = "typedef struct node { int val; struct node *next; } node_t;\n\
                   static const char *names[4] = {\"a\", \"b\"}, flag;\n\
                   int main(void) {\n\
                     unsigned long total = 0, *p = &total;\n\
                     node_t head, *cur;\n\
                     Widget w;\n\
                     int (*cb)(int x) = 0;\n\
                     enum { RED, GREEN } colour = RED;\n\
                     for (int i = 0; i < 4; i++) { double tmp = i; total += tmp; }\n\
                     x * y;\n\
                     foo(bar);\n\
                     return 0;\n\
                   }";
        assert_eq!(
            names(src),
            vec!["names", "flag", "total", "p", "head", "cur", "w", "cb", "colour", "i", "tmp"]
        );
        assert_eq!(kind_of(src, "node_t"), SymbolKind::Other);
        assert_eq!(kind_of(src, "RED"), SymbolKind::Other);
        assert_eq!(kind_of(src, "x"), SymbolKind::Parameter);
    }

    #[test]
    fn redeclaration_merges() {
        let src = "static int s; static int s = 2; int main(void) { return s; }";
        assert_eq!(names(src), vec!["s"]);
        // conflicting kinds drop the carrier
        assert_eq!(names("extern int t; static int t;"), Vec::<String>::new());
    }

    #[test]
    fn occurrences_respect_scope_and_members() {
        let src = "static int n;\n\
                   struct S { int n; };\n\
                   int f(int n) { return n; }\n\
                   int g(struct S *s) { n = s->n; { int n = 2; n++; } goto n; n: return n; }";
        let toks = lex(src.as_bytes()).unwrap();
        let a = find_candidates(&toks, NameMode::Cover).unwrap();
        let names: Vec<&str> = a.candidates.iter().map(|c| a.candidate_name(c)).collect();
        assert_eq!(names, vec!["n", "n"]);
        let outer = a.occurrences(&toks, &a.candidates[0]);
        let offsets: Vec<usize> = outer.iter().map(|&i| toks[i].span.start).collect();
        let expect: Vec<usize> = {
            let decl = src.find("int n;").unwrap() + 4;
            let assign = src.find("n = s->n").unwrap();
            let ret = src.rfind("return n").unwrap() + 7;
            vec![decl, assign, ret]
        };
        assert_eq!(offsets, expect);
        let inner = a.occurrences(&toks, &a.candidates[1]);
        assert_eq!(inner.len(), 2);
    }
}
