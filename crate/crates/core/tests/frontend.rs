use retarget_core::corpus;
use retarget_core::frontend::{parse_source, tokenize, walk_stmts, StmtKind, Target, TokenKind};

#[test]
fn heart_rate_line_tokens() {
    let toks = tokenize("iHR=60./RR*fs; % HR bpm").unwrap();
    let got: Vec<(TokenKind, &str)> = toks.iter().map(|t| (t.kind, t.lexeme.as_str())).collect();
    assert_eq!(
        got,
        [
            (TokenKind::Identifier, "iHR"),
            (TokenKind::Operator, "="),
            (TokenKind::Number, "60"),
            (TokenKind::Operator, "./"),
            (TokenKind::Identifier, "RR"),
            (TokenKind::Operator, "*"),
            (TokenKind::Identifier, "fs"),
            (TokenKind::Punctuation, ";"),
            (TokenKind::Comment, "% HR bpm"),
        ]
    );
}

#[test]
fn destructuring_line_tokens() {
    let toks = tokenize("[~,peak,~]=pan_tompkin(sig,fs,0);").unwrap();
    assert_eq!(
        toks.iter().filter(|t| t.kind == TokenKind::Tilde).count(),
        2
    );
    assert!(toks
        .iter()
        .any(|t| t.kind == TokenKind::Identifier && t.lexeme == "pan_tompkin"));
}

#[test]
fn bundled_program_shape() {
    let prog = parse_source(corpus::EKG_SOURCE).unwrap();
    assert_eq!(prog.functions.len(), 1);
    let f = &prog.functions[0];
    assert_eq!(f.name, "EKGpeakDet");
    assert_eq!(f.outputs, ["iHR", "tHR", "peak"]);
    assert_eq!(f.params, ["sig", "fs"]);

    // Five at the top level: assign, destructuring assign, if/else, two
    // trailing assigns. The two branch bodies bring the total to seven.
    assert_eq!(f.body.len(), 5);
    let mut total = 0;
    walk_stmts(&f.body, &mut |_| total += 1);
    assert_eq!(total, 7);
    let StmtKind::Assign { targets, .. } = &f.body[1].kind else {
        panic!()
    };
    assert_eq!(
        targets,
        &[
            Target::Placeholder,
            Target::Name("peak".into()),
            Target::Placeholder
        ]
    );
    assert!(matches!(f.body[2].kind, StmtKind::If { .. }));
}

#[test]
fn missing_end_is_reported_on_line_3() {
    let err = parse_source("function y = f(x)\nif x > 1\ny = 2;").unwrap_err();
    assert_eq!(err.line(), 3);
}
