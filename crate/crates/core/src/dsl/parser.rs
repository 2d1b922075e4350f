use super::ast::*;
use super::lexer::{tokenize, Tok};
use super::typing::{infer_variable_sorts, TypeIssue};
use super::{DslError, DslErrorKind, Pos};
use std::collections::HashMap;
use std::collections::HashSet;

type Result<T> = std::result::Result<T, DslError>;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn unexpected(&self, wanted: &str) -> DslError {
        DslError::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos> {
        if self.is_keyword(kw) {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(&format!("'{kw}'")))
        }
    }

    fn name(&mut self) -> Result<(String, Pos)> {
        match self.peek().clone() {
            Tok::Name(s) => {
                let p = self.advance().1;
                Ok((s, p))
            }
            _ => Err(self.unexpected("a lowercase name")),
        }
    }

    fn int(&mut self) -> Result<(u64, Pos)> {
        match *self.peek() {
            Tok::Int(n) => {
                let p = self.advance().1;
                Ok((n, p))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Name(s) => {
                self.advance();
                Ok(Term::Const(s))
            }
            Tok::Var(s) => {
                self.advance();
                Ok(Term::Var(s))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// `NAME [ "(" term {"," term} ")" ]`
    fn atom(&mut self) -> Result<(Atom, Pos)> {
        let (name, pos) = self.name()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok((Atom::new(name, args), pos))
    }

    fn literal(&mut self) -> Result<(Literal, Pos)> {
        let start = self.pos();
        let positive = !self.eat(&Tok::Minus);
        let (atom, _) = self.atom()?;
        Ok((Literal { positive, atom }, start))
    }

    fn literals(&mut self) -> Result<Vec<(Literal, Pos)>> {
        let mut out = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn condition(&mut self) -> Result<(Condition, Pos)> {
        let start = self.pos();
        let is_guard = match self.peek() {
            Tok::Var(_) => true,
            Tok::Name(_) => *self.peek2() == Tok::Neq,
            _ => false,
        };
        if is_guard {
            let a = self.term()?;
            self.expect(Tok::Neq)?;
            let b = self.term()?;
            return Ok((Condition::Neq(a, b), start));
        }
        let (lit, pos) = self.literal()?;
        Ok((Condition::Lit(lit), pos))
    }

    fn body(&mut self) -> Result<Vec<(Condition, Pos)>> {
        let mut out = vec![self.condition()?];
        while self.eat(&Tok::Comma) {
            out.push(self.condition()?);
        }
        Ok(out)
    }

    fn optional_body(&mut self) -> Result<Vec<(Condition, Pos)>> {
        if self.eat_keyword("if") {
            self.body()
        } else {
            Ok(Vec::new())
        }
    }

    fn schema(&mut self) -> Result<(Schema, Pos)> {
        let (name, pos) = self.name()?;
        let mut sorts = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                sorts.push(self.name()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok((
            Schema {
                name,
                sorts: sorts.into_iter().map(|(s, _)| s).collect(),
            },
            pos,
        ))
    }
}

fn strip<T>(items: Vec<(T, Pos)>) -> Vec<T> {
    items.into_iter().map(|(t, _)| t).collect()
}

fn type_error(pos: Pos, issue: TypeIssue) -> DslError {
    let kind = match issue {
        TypeIssue::UndeclaredConstant(c) => DslErrorKind::UndeclaredConstant(c),
        TypeIssue::UntypedVariable(v) => DslErrorKind::UntypedVariable(v),
        other => DslErrorKind::Type(other),
    };
    DslError::new(pos, kind)
}

/// Validation context accumulated while reading a domain file.
struct DomainBuilder {
    spec: DomainSpec,
    names: HashSet<String>,
}

impl DomainBuilder {
    fn declare(&mut self, name: &str, pos: Pos) -> Result<()> {
        if !self.names.insert(name.to_string()) {
            return Err(DslError::new(
                pos,
                DslErrorKind::Duplicate(name.to_string()),
            ));
        }
        Ok(())
    }

    fn check_schema_sorts(&self, schema: &Schema, pos: Pos) -> Result<()> {
        for s in &schema.sorts {
            if self.spec.sort(s).is_none() {
                return Err(DslError::new(pos, DslErrorKind::UndeclaredSort(s.clone())));
            }
        }
        Ok(())
    }

    fn action_sorts(&self, atom: &Atom, pos: Pos) -> Result<Vec<String>> {
        self.spec
            .action_schema(&atom.name)
            .map(|s| s.sorts.clone())
            .ok_or_else(|| DslError::new(pos, DslErrorKind::UndeclaredAction(atom.name.clone())))
    }

    fn fluent_sorts(&self, atom: &Atom, pos: Pos) -> Result<Vec<String>> {
        self.spec
            .fluent_schema(&atom.name)
            .map(|s| s.sorts.clone())
            .ok_or_else(|| DslError::new(pos, DslErrorKind::UndeclaredFluent(atom.name.clone())))
    }

    /// Types every atom of one law; `head_action` is the law's action term if it has one.
    fn type_law(
        &self,
        head_action: Option<&(Atom, Pos)>,
        head_lits: &[(Literal, Pos)],
        body: &[(Condition, Pos)],
    ) -> Result<()> {
        let mut typed: Vec<(&Atom, Vec<String>, Pos)> = Vec::new();
        if let Some((a, p)) = head_action {
            typed.push((a, self.action_sorts(a, *p)?, *p));
        }
        for (l, p) in head_lits {
            typed.push((&l.atom, self.fluent_sorts(&l.atom, *p)?, *p));
        }
        for (c, p) in body {
            if let Condition::Lit(l) = c {
                typed.push((&l.atom, self.fluent_sorts(&l.atom, *p)?, *p));
            }
        }
        // Type atom by atom so that a failure points at the offending atom.
        let mut seen = Vec::new();
        for (atom, sorts, pos) in &typed {
            seen.push((*atom, sorts.as_slice()));
            infer_variable_sorts(seen.iter().copied(), &[], &self.spec.sorts)
                .map_err(|e| type_error(*pos, e))?;
        }
        for (i, (c, p)) in body.iter().enumerate() {
            if let Condition::Neq(..) = c {
                infer_variable_sorts(
                    seen.iter().copied(),
                    std::slice::from_ref(&body[i].0),
                    &self.spec.sorts,
                )
                .map_err(|e| type_error(*p, e))?;
            }
        }
        Ok(())
    }
}

/// Parse a `.dom` file.
pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let mut p = Parser::new(text)?;
    let mut b = DomainBuilder {
        spec: DomainSpec::default(),
        names: HashSet::new(),
    };

    while !p.at_eof() {
        let pos = p.pos();
        if p.eat_keyword("sort") {
            let (name, npos) = p.name()?;
            b.declare(&name, npos)?;
            p.expect(Tok::LBrace)?;
            let mut constants = Vec::new();
            loop {
                let (c, cpos) = p.name()?;
                b.declare(&c, cpos)?;
                constants.push(c);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
            p.expect(Tok::RBrace)?;
            p.expect(Tok::Dot)?;
            b.spec.sorts.push(SortDecl { name, constants });
        } else if p.is_keyword("fluent") || p.is_keyword("action") {
            let is_fluent = p.eat_keyword("fluent");
            if !is_fluent {
                p.keyword("action")?;
            }
            let (schema, spos) = p.schema()?;
            b.declare(&schema.name, spos)?;
            b.check_schema_sorts(&schema, spos)?;
            p.expect(Tok::Dot)?;
            if is_fluent {
                b.spec.fluent_schemas.push(schema);
            } else {
                b.spec.action_schemas.push(schema);
            }
        } else if p.eat_keyword("causes") {
            let action = p.atom()?;
            p.expect(Tok::Colon)?;
            let effects = p.literals()?;
            let body = p.optional_body()?;
            p.expect(Tok::Dot)?;
            b.type_law(Some(&action), &effects, &body)?;
            b.spec.dynamic_laws.push(DynamicLaw {
                action: action.0,
                effects: strip(effects),
                body: strip(body),
            });
        } else if p.eat_keyword("static") {
            let head = p.literal()?;
            p.keyword("if")?;
            let body = p.body()?;
            p.expect(Tok::Dot)?;
            b.type_law(None, std::slice::from_ref(&head), &body)?;
            b.spec.static_laws.push(StaticLaw {
                head: head.0,
                body: strip(body),
            });
        } else if p.eat_keyword("exec") {
            let action = p.atom()?;
            p.keyword("if")?;
            let body = p.body()?;
            p.expect(Tok::Dot)?;
            b.type_law(Some(&action), &[], &body)?;
            b.spec.exec_conditions.push(ExecCondition {
                action: action.0,
                body: strip(body),
            });
        } else {
            return Err(DslError::syntax(
                pos,
                format!(
                    "expected 'sort', 'fluent', 'action', 'causes', 'static' or 'exec', found {}",
                    p.peek().describe()
                ),
            ));
        }
    }
    Ok(b.spec)
}

/// `["-"] "permitted" "(" aterm ")" | ["-"] "obl" "(" ["-"] aterm ")"`
fn parse_head(p: &mut Parser) -> Result<Head<Atom>> {
    let negated = p.eat(&Tok::Minus);
    if p.eat_keyword("permitted") {
        p.expect(Tok::LParen)?;
        let (a, _) = p.atom()?;
        p.expect(Tok::RParen)?;
        Ok(if negated {
            Head::Forbidden(a)
        } else {
            Head::Permitted(a)
        })
    } else if p.eat_keyword("obl") {
        p.expect(Tok::LParen)?;
        let refrain = p.eat(&Tok::Minus);
        let (a, _) = p.atom()?;
        p.expect(Tok::RParen)?;
        let duty = Duty { action: a, refrain };
        Ok(if negated {
            Head::NotObliged(duty)
        } else {
            Head::Obliged(duty)
        })
    } else {
        Err(p.unexpected("'permitted' or 'obl'"))
    }
}

fn penalty_level(n: u64, pos: Pos) -> Result<u8> {
    if (1..=3).contains(&n) {
        Ok(n as u8)
    } else {
        Err(DslError::new(pos, DslErrorKind::PenaltyOutOfRange(n)))
    }
}

/// Parse a `.pol` file. Omitted settings take their defaults: default
/// penalty 2, weak penalty 0, no maximum.
pub fn parse_policy(text: &str) -> Result<PolicySpec> {
    let mut p = Parser::new(text)?;
    let mut spec = PolicySpec::default();
    let mut ids: HashMap<String, bool> = HashMap::new(); // id -> defeasible
    let mut prefs: Vec<(String, Pos, String, Pos)> = Vec::new();
    let mut penalties: Vec<(String, Pos)> = Vec::new();
    let mut seen_settings: HashSet<&'static str> = HashSet::new();

    let mut setting = |key: &'static str, pos: Pos| -> Result<()> {
        if !seen_settings.insert(key) {
            return Err(DslError::new(pos, DslErrorKind::Duplicate(key.to_string())));
        }
        Ok(())
    };

    while !p.at_eof() {
        let pos = p.pos();
        if p.is_keyword("rule") || p.is_keyword("default") {
            let defeasible = p.eat_keyword("default");
            if !defeasible {
                p.keyword("rule")?;
            }
            let (id, ipos) = p.name()?;
            if ids.insert(id.clone(), defeasible).is_some() {
                return Err(DslError::new(ipos, DslErrorKind::Duplicate(id)));
            }
            p.expect(Tok::Colon)?;
            let npos = p.pos();
            let normally = p.eat_keyword("normally");
            if defeasible && !normally {
                return Err(DslError::syntax(
                    npos,
                    format!("default rule '{id}' requires 'normally'"),
                ));
            }
            if !defeasible && normally {
                return Err(DslError::syntax(
                    npos,
                    format!("'normally' is not allowed in strict rule '{id}'"),
                ));
            }
            let head = parse_head(&mut p)?;
            let body = strip(p.optional_body()?);
            p.expect(Tok::Dot)?;
            let rule = PolicyRule { id, head, body };
            if defeasible {
                spec.defeasible_rules.push(rule);
            } else {
                spec.strict_rules.push(rule);
            }
        } else if p.eat_keyword("prefer") {
            let (a, apos) = p.name()?;
            let (b, bpos) = p.name()?;
            p.expect(Tok::Dot)?;
            prefs.push((a, apos, b, bpos));
        } else if p.eat_keyword("penalty") {
            let tpos = p.pos();
            let (target, _) = p.name()?;
            p.expect(Tok::Eq)?;
            let (n, npos) = p.int()?;
            p.expect(Tok::Dot)?;
            match target.as_str() {
                "default" => {
                    setting("penalty default", tpos)?;
                    spec.default_penalty = penalty_level(n, npos)?;
                }
                "weak" => {
                    setting("penalty weak", tpos)?;
                    spec.weak_penalty = n;
                }
                _ => {
                    let level = penalty_level(n, npos)?;
                    if spec.rule_penalties.insert(target.clone(), level).is_some() {
                        return Err(DslError::new(
                            tpos,
                            DslErrorKind::Duplicate(format!("penalty {target}")),
                        ));
                    }
                    penalties.push((target, tpos));
                }
            }
        } else if p.eat_keyword("max_penalty") {
            setting("max_penalty", pos)?;
            p.expect(Tok::Eq)?;
            let (n, _) = p.int()?;
            p.expect(Tok::Dot)?;
            spec.max_penalty = Some(n);
        } else {
            return Err(DslError::syntax(
                pos,
                format!(
                    "expected 'rule', 'default', 'prefer', 'penalty' or 'max_penalty', found {}",
                    p.peek().describe()
                ),
            ));
        }
    }

    for (a, apos, b, bpos) in prefs {
        for (id, pos) in [(&a, apos), (&b, bpos)] {
            match ids.get(id) {
                None => return Err(DslError::new(pos, DslErrorKind::UnknownRuleId(id.clone()))),
                Some(false) => {
                    return Err(DslError::new(
                        pos,
                        DslErrorKind::StrictPreference(id.clone()),
                    ))
                }
                Some(true) => {}
            }
        }
        spec.preferences.push((a, b));
    }
    for (id, pos) in penalties {
        if !ids.contains_key(&id) {
            return Err(DslError::new(pos, DslErrorKind::UnknownRuleId(id)));
        }
    }
    Ok(spec)
}

fn ground_literals(p: &mut Parser) -> Result<Vec<(Literal, Pos)>> {
    if *p.peek() == Tok::Dot {
        return Ok(Vec::new());
    }
    let lits = p.literals()?;
    for (l, pos) in &lits {
        if let Some(v) = l.atom.args.iter().find(|t| t.is_var()) {
            return Err(DslError::syntax(
                *pos,
                format!("variable '{v}' not allowed in a problem file"),
            ));
        }
    }
    Ok(lits)
}

/// Parse a `.prb` file. `mode` defaults to normal.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let mut p = Parser::new(text)?;
    p.keyword("init")?;
    let init = ground_literals(&mut p)?;
    p.expect(Tok::Dot)?;
    for (i, (l, pos)) in init.iter().enumerate() {
        if init[..i].iter().any(|(k, _)| k.is_complement_of(l)) {
            return Err(DslError::new(
                *pos,
                DslErrorKind::InconsistentInit(l.atom.to_string()),
            ));
        }
    }

    p.keyword("goal")?;
    let goal = ground_literals(&mut p)?;
    p.expect(Tok::Dot)?;

    p.keyword("horizon")?;
    if *p.peek() == Tok::Minus {
        return Err(DslError::new(p.pos(), DslErrorKind::NegativeHorizon));
    }
    let (h, hpos) = p.int()?;
    let horizon = usize::try_from(h).map_err(|_| DslError::syntax(hpos, "horizon too large"))?;
    p.expect(Tok::Dot)?;

    let mut mode = Mode::Normal;
    if p.eat_keyword("mode") {
        mode = if p.eat_keyword("normal") {
            Mode::Normal
        } else if p.eat_keyword("emergency") {
            Mode::Emergency
        } else {
            return Err(p.unexpected("'normal' or 'emergency'"));
        };
        p.expect(Tok::Dot)?;
    }
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }

    Ok(ProblemSpec {
        init: strip(init),
        goal: strip(goal),
        horizon,
        mode,
    })
}

/// Parse a single action term such as `cruise(base, cust)`. Used for plans
/// given on the command line.
pub fn parse_action_term(text: &str) -> Result<Atom> {
    let mut p = Parser::new(text)?;
    let (atom, pos) = p.atom()?;
    if let Some(v) = atom.args.iter().find(|t| t.is_var()) {
        return Err(DslError::syntax(
            pos,
            format!("variable '{v}' in a ground action"),
        ));
    }
    if !p.at_eof() {
        return Err(p.unexpected("end of action"));
    }
    Ok(atom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOM: &str = "\
sort loc { base, cust }.
fluent high.  fluent at(loc).  fluent delivered.
action ascend.  action cruise(loc, loc).  action descend.  action drop.
causes ascend: high.
causes cruise(X, Y): at(Y), -at(X) if at(X), X != Y.
causes descend: -high.
causes drop: delivered if at(cust).
exec drop if at(cust).
";

    const POL: &str = "\
rule p1: -permitted(cruise(X, Y)) if -high.
rule p2: obl(descend) if at(cust), high, -delivered.
penalty p1 = 3.  penalty p2 = 1.
penalty default = 2.  penalty weak = 0.
";

    fn kind(e: DslError) -> DslErrorKind {
        e.kind
    }

    #[test]
    fn drone_mini_domain_shape() {
        let d = parse_domain(DOM).unwrap();
        assert_eq!(d.sorts.len(), 1);
        assert_eq!(d.fluent_schemas.len(), 3);
        assert_eq!(d.action_schemas.len(), 4);
        assert_eq!(d.dynamic_laws.len(), 4);
        assert_eq!(d.static_laws.len(), 0);
        assert_eq!(d.exec_conditions.len(), 1);
        assert_eq!(
            d.dynamic_laws[1].body[1],
            Condition::Neq(Term::Var("X".into()), Term::Var("Y".into()))
        );
    }

    #[test]
    fn undeclared_sort() {
        let e = parse_domain("fluent at(room).").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::UndeclaredSort("room".into()));
        assert_eq!(e.pos, Pos { line: 1, col: 8 });
        assert!(e.to_string().contains("undeclared sort"));
    }

    #[test]
    fn empty_domain() {
        assert_eq!(parse_domain("").unwrap(), DomainSpec::default());
        assert_eq!(
            parse_domain("% only a comment\n").unwrap(),
            DomainSpec::default()
        );
    }

    #[test]
    fn domain_errors() {
        let dup = parse_domain("sort a { x }. sort b { x }.").unwrap_err();
        assert_eq!(kind(dup), DslErrorKind::Duplicate("x".into()));

        let clash = parse_domain("fluent f. action f.").unwrap_err();
        assert_eq!(kind(clash), DslErrorKind::Duplicate("f".into()));

        let untyped =
            parse_domain("sort s { a }. fluent f(s). action go. causes go: f(a) if X != a.")
                .unwrap_err();
        assert_eq!(kind(untyped), DslErrorKind::UntypedVariable("X".into()));

        let konst =
            parse_domain("sort s { a }. fluent f(s). action go. causes go: f(b).").unwrap_err();
        assert_eq!(kind(konst), DslErrorKind::UndeclaredConstant("b".into()));

        let act = parse_domain("fluent f. causes go: f.").unwrap_err();
        assert_eq!(kind(act), DslErrorKind::UndeclaredAction("go".into()));

        let syn = parse_domain("sort s { a }\nfluent f.").unwrap_err();
        assert!(matches!(syn.kind, DslErrorKind::Syntax(_)));
        assert_eq!(syn.pos, Pos { line: 2, col: 1 });
    }

    #[test]
    fn variable_sort_conflict() {
        let e = parse_domain(
            "sort s { a }. sort t { b }. fluent f(s). fluent g(t). action go. \
             causes go: f(X) if g(X).",
        )
        .unwrap_err();
        assert!(matches!(
            e.kind,
            DslErrorKind::Type(TypeIssue::VariableSortConflict { .. })
        ));
    }

    #[test]
    fn drone_mini_policy() {
        let p = parse_policy(POL).unwrap();
        let ids: Vec<_> = p.strict_rules.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["p1", "p2"]);
        assert!(p.defeasible_rules.is_empty());
        assert_eq!(p.rule_penalties.get("p1"), Some(&3));
        assert_eq!(p.rule_penalties.get("p2"), Some(&1));
        assert_eq!(p.default_penalty, 2);
        assert_eq!(p.weak_penalty, 0);
        assert_eq!(p.max_penalty, None);
        assert!(matches!(p.strict_rules[0].head, Head::Forbidden(_)));
    }

    #[test]
    fn policy_defaults() {
        let p = parse_policy("rule a: permitted(go).").unwrap();
        assert_eq!(p.default_penalty, 2);
        assert_eq!(p.weak_penalty, 0);
        assert_eq!(p.max_penalty, None);
    }

    #[test]
    fn penalty_scale_enforced() {
        let e = parse_policy("rule p1: permitted(go). penalty p1 = 5.").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::PenaltyOutOfRange(5));
        assert!(e.to_string().contains("penalty out of range 1-3"));
        let e = parse_policy("penalty default = 0.").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::PenaltyOutOfRange(0));
        // weak penalty and the cap are not on the rule scale
        let p = parse_policy("penalty weak = 7. max_penalty = 10.").unwrap();
        assert_eq!((p.weak_penalty, p.max_penalty), (7, Some(10)));
    }

    #[test]
    fn preference_validation() {
        let e = parse_policy("default d1: normally permitted(go). prefer d1 d2.").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::UnknownRuleId("d2".into()));
        assert!(e.to_string().contains("unknown rule id"));

        let e = parse_policy(
            "default d1: normally permitted(go). rule s1: -permitted(go). prefer d1 s1.",
        )
        .unwrap_err();
        assert_eq!(e.kind, DslErrorKind::StrictPreference("s1".into()));

        let ok = parse_policy(
            "prefer d1 d2. default d1: normally permitted(go). default d2: normally -permitted(go).",
        )
        .unwrap();
        assert_eq!(ok.preferences, vec![("d1".to_string(), "d2".to_string())]);
    }

    #[test]
    fn normally_keyword_rules() {
        assert!(parse_policy("default d: permitted(go).").is_err());
        assert!(parse_policy("rule r: normally permitted(go).").is_err());
        let dup = parse_policy("rule r: permitted(go). rule r: permitted(go).").unwrap_err();
        assert_eq!(dup.kind, DslErrorKind::Duplicate("r".into()));
    }

    #[test]
    fn obligation_heads() {
        let p = parse_policy("rule a: obl(-go). rule b: -obl(go). rule c: -obl(-go).").unwrap();
        let heads: Vec<String> = p.strict_rules.iter().map(|r| r.head.to_string()).collect();
        assert_eq!(heads, ["obl(-go)", "-obl(go)", "-obl(-go)"]);
    }

    #[test]
    fn problem_parsing() {
        let p =
            parse_problem("init at(base), -high. goal delivered. horizon 4. mode normal.").unwrap();
        assert_eq!(p.horizon, 4);
        assert_eq!(p.mode, Mode::Normal);
        assert_eq!(p.init.len(), 2);

        let p = parse_problem("init high. goal delivered. horizon 2.").unwrap();
        assert_eq!(p.mode, Mode::Normal);

        let p = parse_problem("init high. goal delivered. horizon 2. mode emergency.").unwrap();
        assert_eq!(p.mode, Mode::Emergency);

        let e = parse_problem("init high, -high. goal delivered. horizon 4.").unwrap_err();
        assert!(e.to_string().contains("inconsistent init"));
        assert_eq!(e.pos, Pos { line: 1, col: 12 });

        let e = parse_problem("init high. goal delivered. horizon -1.").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::NegativeHorizon);

        assert!(parse_problem("init at(X). goal d. horizon 1.").is_err());
    }

    #[test]
    fn round_trip_fixtures() {
        let d = parse_domain(DOM).unwrap();
        assert_eq!(parse_domain(&d.to_string()).unwrap(), d);
        let p = parse_policy(POL).unwrap();
        assert_eq!(parse_policy(&p.to_string()).unwrap(), p);
        let prb = parse_problem("init . goal . horizon 0.").unwrap();
        assert_eq!(parse_problem(&prb.to_string()).unwrap(), prb);
    }

    #[test]
    fn action_terms() {
        let a = parse_action_term(" cruise( base ,cust) ").unwrap();
        assert_eq!(a.to_string(), "cruise(base, cust)");
        assert!(parse_action_term("cruise(X, cust)").is_err());
        assert!(parse_action_term("a b").is_err());
    }
}
