use std::collections::HashSet;

use super::lexer::{tokenize, Token, TokenKind};
use super::{
    DomainSpec, Guard, InitialSituation, ParseError, ParseErrorKind, PhysicalAction, SensingAction,
    KEYWORDS,
};
use crate::formula::Formula;
use crate::valuation::{Fluent, FluentValuation, MAX_FLUENTS};

/// Parses a complete domain description.
pub fn parse_domain(text: &str) -> Result<DomainSpec, ParseError> {
    let tokens = tokenize(text)?;
    DomainParser::new(&tokens).domain()
}

/// Parses a formula whose atoms must be among `fluents`.
pub fn parse_formula(text: &str, fluents: &[String]) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = DomainParser::new(&tokens);
    p.fluents = fluents.to_vec();
    let f = p.formula()?;
    p.expect(TokenKind::Eof, "end of formula")?;
    Ok(f)
}

struct DomainParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    fluents: Vec<String>,
    action_names: HashSet<String>,
    init_labels: HashSet<String>,
}

impl<'a> DomainParser<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        Self {
            tokens,
            pos: 0,
            fluents: Vec::new(),
            action_names: HashSet::new(),
            init_labels: HashSet::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> &Token {
        let tok = &self.tokens[self.pos];
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let tok = self.peek();
        ParseError::new(tok.line, tok.column, kind)
    }

    fn expected(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::Expected {
            expected: expected.to_string(),
            found: self.peek().kind.describe(),
        })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.expected(&format!("`{kw}`")))
        }
    }

    /// A user-chosen name; returns it with its position.
    fn name(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Ident(s) if KEYWORDS.contains(&s.as_str()) => Err(ParseError::new(
                tok.line,
                tok.column,
                ParseErrorKind::ReservedWord(s),
            )),
            TokenKind::Ident(s) => {
                self.next();
                Ok((s, tok.line, tok.column))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn fluent_ref(&mut self) -> Result<Fluent, ParseError> {
        let (name, line, column) = self.name("fluent name")?;
        self.fluents
            .iter()
            .position(|f| *f == name)
            .map(Fluent)
            .ok_or_else(|| ParseError::new(line, column, ParseErrorKind::UndeclaredFluent(name)))
    }

    fn domain(mut self) -> Result<DomainSpec, ParseError> {
        if self.peek().kind == TokenKind::Eof {
            return Err(self.error_here(ParseErrorKind::ExpectedDeclaration));
        }
        let mut physical_actions = Vec::new();
        let mut sensing_actions = Vec::new();
        let mut initial_situations = Vec::new();
        let mut actual = None;
        let mut seq = None;

        while self.peek().kind != TokenKind::Eof {
            let tok = self.peek().clone();
            let keyword = match &tok.kind {
                TokenKind::Ident(s) => s.clone(),
                _ => return Err(self.error_here(ParseErrorKind::ExpectedDeclaration)),
            };
            self.next();
            match keyword.as_str() {
                "fluent" => self.fluent_decl()?,
                "action" => physical_actions.push(self.action_decl()?),
                "sense" => sensing_actions.push(self.sense_decl()?),
                "init" => initial_situations.push(self.init_decl()?),
                "actual" => {
                    if actual.is_some() {
                        return Err(ParseError::new(
                            tok.line,
                            tok.column,
                            ParseErrorKind::Duplicate {
                                what: "declaration",
                                name: "actual".into(),
                            },
                        ));
                    }
                    let (valuation, _) = self.assignment_block("actual", false)?;
                    actual = Some(valuation);
                }
                "seq" => {
                    if seq.is_some() {
                        return Err(ParseError::new(
                            tok.line,
                            tok.column,
                            ParseErrorKind::Duplicate {
                                what: "declaration",
                                name: "seq".into(),
                            },
                        ));
                    }
                    seq = Some(self.seq_decl()?);
                }
                _ => {
                    return Err(ParseError::new(
                        tok.line,
                        tok.column,
                        ParseErrorKind::ExpectedDeclaration,
                    ))
                }
            }
        }

        let actual_initial =
            actual.ok_or_else(|| self.error_here(ParseErrorKind::MissingActual))?;
        Ok(DomainSpec {
            fluents: self.fluents,
            physical_actions,
            sensing_actions,
            initial_situations,
            actual_initial,
            seq,
        })
    }

    fn fluent_decl(&mut self) -> Result<(), ParseError> {
        if self.eat(&TokenKind::Semi) {
            return Ok(());
        }
        loop {
            let (name, line, column) = self.name("fluent name")?;
            if self.fluents.contains(&name) {
                return Err(ParseError::new(
                    line,
                    column,
                    ParseErrorKind::Duplicate {
                        what: "fluent",
                        name,
                    },
                ));
            }
            if self.fluents.len() == MAX_FLUENTS {
                return Err(ParseError::new(
                    line,
                    column,
                    ParseErrorKind::TooManyFluents(MAX_FLUENTS),
                ));
            }
            self.fluents.push(name);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semi, "`,` or `;`")
    }

    fn action_name(&mut self) -> Result<String, ParseError> {
        let (name, line, column) = self.name("action name")?;
        if !self.action_names.insert(name.clone()) {
            return Err(ParseError::new(
                line,
                column,
                ParseErrorKind::Duplicate {
                    what: "action",
                    name,
                },
            ));
        }
        Ok(name)
    }

    fn action_decl(&mut self) -> Result<PhysicalAction, ParseError> {
        let name = self.action_name()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut precondition = None;
        let mut effects: Vec<(Fluent, Formula)> = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.at_keyword("poss") {
                let tok = self.next().clone();
                if precondition.is_some() {
                    return Err(ParseError::new(
                        tok.line,
                        tok.column,
                        ParseErrorKind::Duplicate {
                            what: "precondition in action",
                            name: name.clone(),
                        },
                    ));
                }
                precondition = Some(self.formula()?);
            } else {
                let (line, column) = (self.peek().line, self.peek().column);
                let fluent = self.fluent_ref()?;
                if effects.iter().any(|(f, _)| *f == fluent) {
                    return Err(ParseError::new(
                        line,
                        column,
                        ParseErrorKind::Duplicate {
                            what: "assignment to fluent",
                            name: self.fluents[fluent.0].clone(),
                        },
                    ));
                }
                self.expect(TokenKind::Assign, "`:=`")?;
                effects.push((fluent, self.formula()?));
            }
            self.expect(TokenKind::Semi, "`;`")?;
        }
        Ok(PhysicalAction {
            name,
            precondition: precondition.unwrap_or(Formula::True),
            effects,
        })
    }

    fn sense_decl(&mut self) -> Result<SensingAction, ParseError> {
        let name = self.action_name()?;
        let mut accuracy = 1.0;
        if self.at_keyword("accuracy") {
            self.next();
            self.expect(TokenKind::Eq, "`=`")?;
            let tok = self.next().clone();
            let TokenKind::Number(raw) = tok.kind else {
                return Err(ParseError::new(
                    tok.line,
                    tok.column,
                    ParseErrorKind::Expected {
                        expected: "accuracy value".into(),
                        found: tok.kind.describe(),
                    },
                ));
            };
            accuracy = raw.parse::<f64>().map_err(|_| {
                ParseError::new(
                    tok.line,
                    tok.column,
                    ParseErrorKind::InvalidNumber(raw.clone()),
                )
            })?;
            if !(0.0..=1.0).contains(&accuracy) {
                return Err(ParseError::new(
                    tok.line,
                    tok.column,
                    ParseErrorKind::AccuracyOutOfRange(raw),
                ));
            }
        }
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut guards = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            self.expect_keyword("guard")?;
            let condition = self.formula()?;
            self.expect_keyword("senses")?;
            let sensed = self.formula()?;
            self.expect(TokenKind::Semi, "`;`")?;
            guards.push(Guard { condition, sensed });
        }
        Ok(SensingAction {
            name,
            guards,
            accuracy,
        })
    }

    fn init_decl(&mut self) -> Result<InitialSituation, ParseError> {
        let (label, line, column) = self.name("situation label")?;
        if !self.init_labels.insert(label.clone()) {
            return Err(ParseError::new(
                line,
                column,
                ParseErrorKind::Duplicate {
                    what: "initial situation",
                    name: label,
                },
            ));
        }
        let (valuation, pl) = self.assignment_block(&label, true)?;
        let pl = pl.ok_or_else(|| {
            ParseError::new(
                line,
                column,
                ParseErrorKind::MissingPlausibility(label.clone()),
            )
        })?;
        Ok(InitialSituation {
            label,
            valuation,
            pl,
        })
    }

    /// `{ [pl=N;] F=true; ... }` with every fluent assigned exactly once.
    fn assignment_block(
        &mut self,
        label: &str,
        allow_pl: bool,
    ) -> Result<(FluentValuation, Option<u64>), ParseError> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut valuation = FluentValuation::default();
        let mut assigned = vec![false; self.fluents.len()];
        let mut pl = None;
        while !self.eat(&TokenKind::RBrace) {
            if allow_pl && self.at_keyword("pl") {
                let tok = self.next().clone();
                if pl.is_some() {
                    return Err(ParseError::new(
                        tok.line,
                        tok.column,
                        ParseErrorKind::Duplicate {
                            what: "plausibility in",
                            name: label.to_string(),
                        },
                    ));
                }
                self.expect(TokenKind::Eq, "`=`")?;
                pl = Some(self.plausibility()?);
            } else {
                let (line, column) = (self.peek().line, self.peek().column);
                let fluent = self.fluent_ref()?;
                if assigned[fluent.0] {
                    return Err(ParseError::new(
                        line,
                        column,
                        ParseErrorKind::Duplicate {
                            what: "assignment to fluent",
                            name: self.fluents[fluent.0].clone(),
                        },
                    ));
                }
                assigned[fluent.0] = true;
                self.expect(TokenKind::Eq, "`=`")?;
                let value = if self.at_keyword("true") {
                    true
                } else if self.at_keyword("false") {
                    false
                } else {
                    return Err(self.expected("`true` or `false`"));
                };
                self.next();
                valuation.set(fluent, value);
            }
            self.expect(TokenKind::Semi, "`;`")?;
        }
        if let Some(i) = assigned.iter().position(|a| !a) {
            let tok = &self.tokens[self.pos - 1];
            return Err(ParseError::new(
                tok.line,
                tok.column,
                ParseErrorKind::Unassigned {
                    label: label.to_string(),
                    fluent: self.fluents[i].clone(),
                },
            ));
        }
        Ok((valuation, pl))
    }

    fn plausibility(&mut self) -> Result<u64, ParseError> {
        let tok = self.next().clone();
        let TokenKind::Number(raw) = tok.kind else {
            return Err(ParseError::new(
                tok.line,
                tok.column,
                ParseErrorKind::Expected {
                    expected: "plausibility".into(),
                    found: tok.kind.describe(),
                },
            ));
        };
        if raw.starts_with('-') && raw.len() > 1 {
            return Err(ParseError::new(
                tok.line,
                tok.column,
                ParseErrorKind::NegativePlausibility(raw),
            ));
        }
        raw.parse::<u64>()
            .map_err(|_| ParseError::new(tok.line, tok.column, ParseErrorKind::InvalidNumber(raw)))
    }

    fn seq_decl(&mut self) -> Result<Vec<String>, ParseError> {
        let mut seq = Vec::new();
        if self.eat(&TokenKind::Semi) {
            return Ok(seq);
        }
        loop {
            let (name, _, _) = self.name("action name")?;
            seq.push(name);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semi, "`,` or `;`")?;
        Ok(seq)
    }

    // Formula grammar, loosest binding first:
    //   iff     := implies ("<->" implies)*
    //   implies := or ("->" implies)?
    //   or      := and ("|" and)*
    //   and     := unary ("&" unary)*
    //   unary   := "!" unary | primary
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.eat(&TokenKind::DoubleArrow) {
            lhs = lhs.iff(self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&TokenKind::Arrow) {
            Ok(lhs.implies(self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&TokenKind::Pipe) {
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::Amp) {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&TokenKind::Bang) {
            return Ok(self.unary()?.not());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&TokenKind::LParen) {
            let f = self.formula()?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(f);
        }
        let modal = |p: &mut Self, wrap: fn(Formula) -> Formula| {
            p.next();
            p.expect(TokenKind::LParen, "`(`")?;
            let f = p.formula()?;
            p.expect(TokenKind::RParen, "`)`")?;
            Ok(wrap(f))
        };
        match &self.peek().kind {
            TokenKind::Ident(s) if s == "true" => {
                self.next();
                Ok(Formula::True)
            }
            TokenKind::Ident(s) if s == "false" => {
                self.next();
                Ok(Formula::False)
            }
            TokenKind::Ident(s) if s == "Bel" => modal(self, Formula::bel),
            TokenKind::Ident(s) if s == "Prev" => modal(self, Formula::prev),
            TokenKind::Ident(_) => Ok(Formula::Atom(self.fluent_ref()?)),
            _ => Err(self.expected("formula")),
        }
    }
}
