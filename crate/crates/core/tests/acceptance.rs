//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use case_stego::analysis::{compare_histograms, histogram, verify_invariance, Channel};
use case_stego::caseless::{self, LanguageProfile, Strategy, TokenKind as PasKind};
use case_stego::html::{self, LengthMode};
use case_stego::ident::{self, NameMode, TokenKind as CKind};
use case_stego::{BitVector, Error, XorKey};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use regex::Regex;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixtures(dir: &str) -> Vec<(String, Vec<u8>)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(dir);
    let mut files: Vec<_> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn random_bits(rng: &mut StdRng, len: usize) -> BitVector {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

fn random_key(rng: &mut StdRng) -> XorKey {
    let len = rng.gen_range(1..=8);
    XorKey::new((0..len).map(|_| rng.gen::<u8>()).collect::<Vec<_>>()).unwrap()
}

fn fold(doc: &[u8]) -> Vec<u8> {
    doc.iter().map(|b| b.to_ascii_lowercase()).collect()
}

fn mixed_case(rng: &mut StdRng, word: &str) -> String {
    word.chars()
        .map(|c| {
            if rng.gen_bool(0.5) {
                c.to_ascii_uppercase()
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Tag soup and a brute-force site counter

const TAGS: &[&str] = &[
    "html", "head", "body", "div", "span", "p", "a", "img", "table", "tr", "td", "ul", "li", "b",
    "i", "em", "strong", "form", "input", "br", "h1", "h2", "section", "nav", "header", "footer",
    "button", "label", "select", "option", "meta", "link",
];
const RAW_TAGS: &[&str] = &["script", "style", "title", "textarea"];
const ATTRS: &[&str] = &[
    "id",
    "class",
    "href",
    "src",
    "alt",
    "title",
    "width",
    "height",
    "style",
    "type",
    "name",
    "value",
    "data-role",
    "aria-label",
    "onclick",
    "xml:lang",
    "checked",
    "disabled",
    "colspan",
];
const WORDS: &[&str] = &[
    "lorem",
    "ipsum",
    "Dolor",
    "SIT",
    "amet",
    "news",
    "Home",
    "about",
    "1 < 2",
    "x > y",
    "&amp;",
    "caf\u{e9}",
    "Total:",
    "it's",
    "\"quoted\"",
    "a=b",
];

fn words(rng: &mut StdRng, n: usize) -> String {
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn attribute(rng: &mut StdRng) -> String {
    let attr = *ATTRS.choose(rng).unwrap();
    let name = mixed_case(rng, attr);
    let eq = if rng.gen_bool(0.1) { " = " } else { "=" };
    match rng.gen_range(0..5) {
        0 => name,
        1 => format!(
            "{name}{eq}\"{} 'x' > y\"",
            words(rng, 2).replace('"', "&quot;")
        ),
        2 => format!("{name}{eq}'{} \"q\"'", words(rng, 1).replace('\'', "&#39;")),
        3 => format!(
            "{name}{eq}{}",
            ["left", "50%", "#FFF", "/a/b.html", "Top10"]
                .choose(rng)
                .unwrap()
        ),
        _ => format!("{name}{eq}\"\""),
    }
}

fn start_tag(rng: &mut StdRng, name: &str) -> String {
    let mut tag = format!("<{}", mixed_case(rng, name));
    for _ in 0..rng.gen_range(0..4) {
        tag.push_str([" ", "  ", "\n", "\t"].choose(rng).unwrap());
        tag.push_str(&attribute(rng));
    }
    if rng.gen_bool(0.1) {
        tag.push_str(" /");
    }
    tag.push('>');
    tag
}

fn tag_soup(rng: &mut StdRng) -> String {
    let mut doc = String::new();
    for _ in 0..rng.gen_range(20..120) {
        match rng.gen_range(0..12) {
            0..=3 => {
                let name = *TAGS.choose(rng).unwrap();
                doc.push_str(&start_tag(rng, name));
            }
            4 | 5 => {
                let name = *TAGS.choose(rng).unwrap();
                doc.push_str(&format!("</{}>", mixed_case(rng, name)));
            }
            6 | 7 => {
                let n = rng.gen_range(1..6);
                doc.push_str(&words(rng, n));
            }
            8 => doc.push_str(&format!("<!-- {} <B>fake</B> -->", words(rng, 2))),
            9 => {
                let name = *RAW_TAGS.choose(rng).unwrap();
                let open = start_tag(rng, name);
                let body = format!("if (a < b) {{ x = \"<I>\" + '{}'; }}", words(rng, 2));
                doc.push_str(&format!("{open}{body}</{}>", mixed_case(rng, name)));
            }
            10 => doc.push('\n'),
            _ => doc.push_str(
                [
                    "<!DOCTYPE html>",
                    "<?xml version=\"1.0\"?>",
                    "<br />",
                    "<HR>",
                    "</>",
                    "</ odd thing>",
                ]
                .choose(rng)
                .unwrap(),
            ),
        }
    }
    doc
}

fn snippet(doc: &[u8], at: usize) -> String {
    String::from_utf8_lossy(&doc[at.saturating_sub(40)..(at + 40).min(doc.len())]).into_owned()
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0C)
}

fn find_from(doc: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    (from..doc.len()).find(|&i| doc[i..].starts_with(needle))
}

fn past(doc: &[u8], from: usize, byte: u8) -> usize {
    (from..doc.len())
        .find(|&i| doc[i] == byte)
        .map_or(doc.len(), |p| p + 1)
}

/// Letters of tag names and attribute names, found by walking characters.
fn brute_force_sites(doc: &[u8]) -> Vec<usize> {
    let n = doc.len();
    let mut sites = Vec::new();
    let mut i = 0;
    while i < n {
        if doc[i] != b'<' {
            i += 1;
            continue;
        }
        if doc[i..].starts_with(b"<!--") {
            i = find_from(doc, i + 4, b"-->").map_or(n, |p| p + 3);
            continue;
        }
        if matches!(doc.get(i + 1), Some(b'!' | b'?')) {
            i = past(doc, i + 2, b'>');
            continue;
        }
        let closing = doc.get(i + 1) == Some(&b'/');
        let mut j = if closing { i + 2 } else { i + 1 };
        if !doc.get(j).is_some_and(u8::is_ascii_alphabetic) {
            i = if closing { past(doc, j, b'>') } else { i + 1 };
            continue;
        }
        let mut name = Vec::new();
        while j < n && !is_ws(doc[j]) && doc[j] != b'/' && doc[j] != b'>' {
            if doc[j].is_ascii_alphabetic() {
                sites.push(j);
            }
            name.push(doc[j].to_ascii_lowercase());
            j += 1;
        }
        loop {
            while j < n && (is_ws(doc[j]) || doc[j] == b'/') {
                j += 1;
            }
            if j >= n || doc[j] == b'>' {
                break;
            }
            while j < n && !is_ws(doc[j]) && !matches!(doc[j], b'/' | b'>' | b'=') {
                if doc[j].is_ascii_alphabetic() {
                    sites.push(j);
                }
                j += 1;
            }
            let mut k = j;
            while k < n && is_ws(doc[k]) {
                k += 1;
            }
            if k < n && doc[k] == b'=' {
                j = k + 1;
                while j < n && is_ws(doc[j]) {
                    j += 1;
                }
                if j < n && (doc[j] == b'"' || doc[j] == b'\'') {
                    j = past(doc, j + 1, doc[j]);
                } else {
                    while j < n && !is_ws(doc[j]) && doc[j] != b'>' {
                        j += 1;
                    }
                }
            }
        }
        i = j + 1;
        if closing {
            continue;
        }
        if name == b"plaintext" {
            break;
        }
        if RAW_TAGS
            .iter()
            .chain(&["xmp", "iframe", "noembed", "noframes", "noscript"])
            .any(|r| r.as_bytes() == name)
        {
            let mut closer = b"</".to_vec();
            closer.extend_from_slice(&name);
            let lower = fold(doc);
            i = (i..n)
                .find(|&p| {
                    lower[p..].starts_with(&closer)
                        && lower
                            .get(p + closer.len())
                            .is_none_or(|&b| is_ws(b) || b == b'/' || b == b'>')
                })
                .unwrap_or(n);
        }
    }
    sites
}

fn folded_letter_counts(doc: &[u8]) -> [u64; 26] {
    let mut counts = [0u64; 26];
    for b in doc.iter().filter(|b| b.is_ascii_alphabetic()) {
        counts[(b.to_ascii_lowercase() - b'a') as usize] += 1;
    }
    counts
}

// ---------------------------------------------------------------------------
// Criteria 1-4, 8: html channel

struct HtmlRun {
    inband_pairs: Vec<(Vec<u8>, Vec<u8>)>,
    trials: usize,
    elapsed: Duration,
}

fn html_trials() -> Result<HtmlRun, String> {
    let mut rng = StdRng::seed_from_u64(0x4854_4d4c);
    let corpus = fixtures("html");
    ensure!(
        corpus.len() >= 5,
        "need at least 5 html fixtures, found {}",
        corpus.len()
    );
    let mut inband_pairs = Vec::new();
    let start = Instant::now();
    let trials = 1000;
    for t in 0..trials {
        let (label, cover) = if t % 10 == 0 {
            let (name, doc) = &corpus[(t / 10) % corpus.len()];
            (name.clone(), doc.clone())
        } else {
            (format!("soup #{t}"), tag_soup(&mut rng).into_bytes())
        };
        let mode = if t % 2 == 0 {
            LengthMode::InBand
        } else {
            LengthMode::HeaderTag
        };
        let key = ((t / 2) % 2 == 1).then(|| random_key(&mut rng));
        let capacity = html::capacity(&cover, mode).map_err(|e| {
            let at = match e {
                Error::UnterminatedTag { offset } => offset,
                _ => 0,
            };
            format!("{label}: {e} near {:?}", snippet(&cover, at))
        })?;
        let len = rng.gen_range(0..=capacity);
        let payload = random_bits(&mut rng, len);
        let stego = html::embed(&cover, &payload, mode, key.as_ref())
            .map_err(|e| format!("{label} {mode:?}: embed failed: {e}"))?;
        let back = html::extract_bits(&stego, mode, key.as_ref())
            .map_err(|e| format!("{label} {mode:?}: extract failed: {e}"))?;
        ensure!(
            back == payload,
            "{label} {mode:?}: payload of {len} bits not recovered"
        );
        if mode == LengthMode::InBand {
            inband_pairs.push((cover, stego));
        }
    }
    Ok(HtmlRun {
        inband_pairs,
        trials,
        elapsed: start.elapsed(),
    })
}

fn criterion_1(run: &Result<HtmlRun, String>) -> Outcome {
    let run = run.as_ref().map_err(Clone::clone)?;
    ensure!(
        run.elapsed < Duration::from_secs(10),
        "took {:.2?}, limit is 10 s",
        run.elapsed
    );
    Ok(format!(
        "{} trials recovered exactly in {:.2?}",
        run.trials, run.elapsed
    ))
}

fn criterion_2(run: &Result<HtmlRun, String>) -> Outcome {
    let run = run.as_ref().map_err(Clone::clone)?;
    for (n, (cover, stego)) in run.inband_pairs.iter().enumerate() {
        ensure!(
            fold(cover) == fold(stego),
            "pair {n}: folded stego differs from folded cover"
        );
        let sites: HashSet<usize> = brute_force_sites(cover).into_iter().collect();
        if let Some(at) = (0..cover.len()).find(|&i| cover[i] != stego[i] && !sites.contains(&i)) {
            return Err(format!(
                "pair {n}: byte {at} changed but is not a tag or attribute name letter"
            ));
        }
        let report = verify_invariance(cover, stego, Channel::Html(LengthMode::InBand));
        ensure!(report.holds, "pair {n}: {}", report.detail);
    }
    Ok(format!(
        "{} InBand pairs fold-equal",
        run.inband_pairs.len()
    ))
}

fn criterion_3(run: &Result<HtmlRun, String>) -> Outcome {
    let run = run.as_ref().map_err(Clone::clone)?;
    for (n, (cover, stego)) in run.inband_pairs.iter().enumerate() {
        let (c, s) = (folded_letter_counts(cover), folded_letter_counts(stego));
        if let Some(letter) = (0..26).find(|&l| c[l] != s[l]) {
            return Err(format!(
                "pair {n}: letter {} has {} in cover, {} in stego",
                (b'a' + letter as u8) as char,
                c[letter],
                s[letter]
            ));
        }
        let report = compare_histograms(&histogram(cover), &histogram(stego));
        ensure!(
            report.flagged_pairs().is_empty(),
            "pair {n}: report flags {:?}",
            report.flagged_pairs()
        );
    }
    Ok(format!(
        "{} pairs, zero folded-letter deltas",
        run.inband_pairs.len()
    ))
}

fn criterion_4() -> Outcome {
    let cover = b"<HTML><HEAD LANG=en><TITLE>Example</TITLE></HEAD>\n<BODY BGCOLOR=white><P ALIGN=center>Hi</P></BODY></HTML>";
    let mut rng = StdRng::seed_from_u64(25);
    let payload = random_bits(&mut rng, 25);
    let stego =
        html::embed(cover, &payload, LengthMode::HeaderTag, None).map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&stego);
    ensure!(
        text.contains("<Header 25>"),
        "no literal <Header 25> in {text}"
    );
    ensure!(
        html::extract_bits(&stego, LengthMode::HeaderTag, None).map_err(|e| e.to_string())?
            == payload,
        "25-bit payload not recovered"
    );

    // hand trace: a 1 bit turns a lowercase letter into its uppercase partner
    let bits = [true, false, true, true];
    let traced: Vec<u8> = b"head"
        .iter()
        .zip(bits)
        .map(|(&c, bit)| if bit { c - (b'a' - b'A') } else { c })
        .collect();
    let expected = [b"<".as_slice(), &traced, b">"].concat();
    ensure!(
        expected == b"<HeAD>",
        "hand trace gave {}",
        String::from_utf8_lossy(&expected)
    );
    let payload: BitVector = bits.into_iter().collect();
    let stego =
        html::embed(b"<head>", &payload, LengthMode::HeaderTag, None).map_err(|e| e.to_string())?;
    ensure!(
        stego == b"<HeAD><Header 4>",
        "<head> + 1011 gave {}",
        String::from_utf8_lossy(&stego)
    );
    Ok("<Header 25> present; <head> + 1011 -> <HeAD>".into())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x0008);
    let mut covers: Vec<(String, Vec<u8>)> = (0..100)
        .map(|n| (format!("soup #{n}"), tag_soup(&mut rng).into_bytes()))
        .collect();
    // a few covers too small to hold the prefix
    covers[0].1 = b"<p>tiny</p>".to_vec();
    covers[1].1 = b"no markup at all".to_vec();
    covers[2].1 = b"<table border=1><tr><td valign=top>x</td></tr></table>".to_vec();
    let corpus = fixtures("html");
    for (label, cover) in covers.iter().chain(&corpus) {
        let sites = brute_force_sites(cover);
        let expected = sites.len().saturating_sub(32);
        let scanned: Vec<usize> = html::scan(cover)
            .map_err(|e| format!("{label}: {}", Error::from(e)))?
            .sites
            .iter()
            .map(|s| s.offset)
            .collect();
        if let Some(k) =
            (0..scanned.len().max(sites.len())).find(|&k| scanned.get(k) != sites.get(k))
        {
            let at = scanned.get(k).or(sites.get(k)).copied().unwrap_or(0);
            return Err(format!(
                "{label}: site {k} at {:?} vs brute force {:?} near {:?}",
                scanned.get(k),
                sites.get(k),
                snippet(cover, at)
            ));
        }
        let got = html::capacity(cover, LengthMode::InBand).map_err(|e| format!("{label}: {e}"))?;
        ensure!(
            got == expected,
            "{label}: capacity {got}, brute force says {expected}"
        );
    }
    Ok(format!(
        "{} random covers and {} fixtures match",
        covers.len(),
        corpus.len()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5: caseless channel on generated Pascal

const PASCAL_WORDS: &[&str] = &[
    "count",
    "total",
    "x",
    "i",
    "Index",
    "buffer",
    "res",
    "tmp_val",
    "Item2",
    "writeln",
    "readln",
    "Integer",
    "Real",
    "Acc",
    "n",
    "limit",
    "ch",
    "Done",
    "Sum_Of_Sq",
];

fn pascal_string(rng: &mut StdRng) -> String {
    let body: String = (0..rng.gen_range(0..12))
        .map(|_| {
            *["a", "B", "Begin", " ", "''", "x:=1", "END", "{", "*)", "\\"]
                .choose(rng)
                .unwrap()
        })
        .collect();
    format!("'{body}'")
}

fn pascal_source(rng: &mut StdRng) -> String {
    let profile_names: Vec<String> = (0..rng.gen_range(4..9))
        .map(|_| PASCAL_WORDS.choose(rng).unwrap().to_string())
        .collect();
    let kw = |rng: &mut StdRng, w: &str| mixed_case(rng, w);
    let id = |rng: &mut StdRng| {
        let w = profile_names.choose(rng).unwrap().clone();
        mixed_case(rng, &w)
    };
    let mut src = format!("{} Demo{};\n", kw(rng, "program"), rng.gen_range(0..99));
    if rng.gen_bool(0.5) {
        src.push_str("{ header comment: BEGIN 'not a string' END }\n");
    }
    src.push_str(&format!(
        "{} {}, {} : {};\n",
        kw(rng, "var"),
        id(rng),
        id(rng),
        kw(rng, "integer")
    ));
    src.push_str(&format!("{}\n", kw(rng, "begin")));
    for _ in 0..rng.gen_range(12..30) {
        let line = match rng.gen_range(0..9) {
            0 => format!("{} := {} + {};", id(rng), id(rng), rng.gen_range(0..500)),
            1 => format!(
                "{} {} > {} {} {} := {} {} {} := {};",
                kw(rng, "if"),
                id(rng),
                rng.gen_range(0..9),
                kw(rng, "then"),
                id(rng),
                id(rng),
                kw(rng, "else"),
                id(rng),
                pascal_string(rng)
            ),
            2 => format!(
                "{} {} < {} {} {} := {} {} 2;",
                kw(rng, "while"),
                id(rng),
                rng.gen_range(10..99),
                kw(rng, "do"),
                id(rng),
                id(rng),
                kw(rng, "div")
            ),
            3 => format!(
                "{} {} := 1 {} {} {} WriteLn({}, {});",
                kw(rng, "for"),
                id(rng),
                kw(rng, "to"),
                rng.gen_range(2..20),
                kw(rng, "do"),
                pascal_string(rng),
                id(rng)
            ),
            4 => format!(
                "// trailing note with IF and 'quote\n{} := ${:X};",
                id(rng),
                rng.gen::<u16>()
            ),
            5 => format!(
                "(* Block {} comment *) {} := {};",
                rng.gen::<u8>(),
                id(rng),
                pascal_string(rng)
            ),
            6 => format!(
                "{} {} := {} {} 3 {} {} = 0;",
                kw(rng, "repeat"),
                id(rng),
                id(rng),
                kw(rng, "mod"),
                kw(rng, "until"),
                id(rng)
            ),
            7 => format!("{} := {}.5E3 * {};", id(rng), rng.gen_range(0..9), id(rng)),
            _ => format!(
                "{} {} {} ({} {} 1) {} {};",
                kw(rng, "if"),
                kw(rng, "not"),
                id(rng),
                id(rng),
                kw(rng, "and"),
                kw(rng, "then"),
                kw(rng, "exit")
            ),
        };
        src.push_str("  ");
        src.push_str(&line);
        src.push_str(if rng.gen_bool(0.9) { "\n" } else { "\r\n" });
    }
    src.push_str(&format!("{}.\n", kw(rng, "end")));
    src
}

fn criterion_5() -> Outcome {
    let profile = LanguageProfile::pascal();
    let strategies = [
        Strategy::All,
        Strategy::FirstChar,
        Strategy::KeywordsOnly,
        Strategy::IdentifiersOnly,
    ];
    let mut rng = StdRng::seed_from_u64(0x5041_5343);
    let mut trials = 0;
    for n in 0..500 {
        let cover = pascal_source(&mut rng).into_bytes();
        let cover_tokens =
            caseless::tokenize(&cover, &profile).map_err(|e| format!("source {n}: {e}"))?;
        for strategy in strategies {
            let label = format!("source {n} {strategy:?}");
            let capacity = caseless::capacity(&cover, &profile, strategy)
                .map_err(|e| format!("{label}: {e}"))?;
            let len = rng.gen_range(0..=capacity);
            let payload = random_bits(&mut rng, len);
            let key = rng.gen_bool(0.5).then(|| random_key(&mut rng));
            let stego = caseless::embed(&cover, &payload, &profile, strategy, key.as_ref())
                .map_err(|e| format!("{label}: embed failed: {e}"))?;
            let back = caseless::extract_bits(&stego, &profile, strategy, key.as_ref())
                .map_err(|e| format!("{label}: extract failed: {e}"))?;
            ensure!(back == payload, "{label}: payload not recovered");
            ensure!(
                fold(&cover) == fold(&stego),
                "{label}: case-folded text differs"
            );

            let stego_tokens =
                caseless::tokenize(&stego, &profile).map_err(|e| format!("{label}: {e}"))?;
            ensure!(
                cover_tokens.len() == stego_tokens.len(),
                "{label}: token count changed"
            );
            for (c, s) in cover_tokens.iter().zip(&stego_tokens) {
                ensure!(
                    c.kind == s.kind && c.span == s.span,
                    "{label}: token at {:?} became {:?} {:?}",
                    c.span,
                    s.kind,
                    s.span
                );
                if matches!(c.kind, PasKind::StringLiteral | PasKind::Comment) {
                    ensure!(
                        c.text == s.text,
                        "{label}: {:?} at {:?} altered",
                        c.kind,
                        c.span
                    );
                }
                if strategy == Strategy::KeywordsOnly && c.kind == PasKind::Identifier
                    || strategy == Strategy::IdentifiersOnly && c.kind == PasKind::Keyword
                {
                    ensure!(
                        c.text == s.text,
                        "{label}: non-carrier token at {:?} altered",
                        c.span
                    );
                }
            }
            let report = verify_invariance(
                &cover,
                &stego,
                Channel::Caseless {
                    profile: &profile,
                    strategy,
                },
            );
            ensure!(report.holds, "{label}: {}", report.detail);
            trials += 1;
        }
    }
    Ok(format!("{trials} round trips across 4 strategies"))
}

// ---------------------------------------------------------------------------
// Criterion 6: identifier channel on C fixtures

/// Carrier variables of each fixture, in declaration order, labelled by hand.
const C_CANDIDATES: &[(&str, &[&str])] = &[
    ("01_sum.c", &["total", "count"]),
    ("02_strlen.c", &["p", "greeting", "len"]),
    ("03_bubble.c", &["i", "j", "tmp", "data", "k"]),
    ("04_struct_point.c", &["dx", "dy", "origin", "target", "d"]),
    (
        "05_linked_list.c",
        &["fresh", "n", "cur", "list", "i", "victim"],
    ),
    ("06_switch_calc.c", &["result", "ops", "idx", "acc"]),
    (
        "07_counter_static.c",
        &["calls", "banner", "seed", "first", "second"],
    ),
    ("08_func_pointer.c", &["ops", "chosen", "input", "out"]),
    (
        "09_matrix.c",
        &["left", "right", "product", "r", "c", "m", "cell"],
    ),
    ("10_enum_state.c", &["after", "state", "ticks"]),
    (
        "11_goto_cleanup.c",
        &["fp", "buffer", "status", "got", "rc"],
    ),
    ("12_do_while.c", &["number", "digits", "sum"]),
    ("13_shadowing.c", &["level", "level", "width"]),
    (
        "14_strings.c",
        &["walk", "message", "vowels", "found", "pos"],
    ),
    ("15_typedef_union.c", &["probe", "mask", "half", "le"]),
    ("16_macro_mix.c", &["step", "squares", "area"]),
    (
        "17_recursion.c",
        &["below", "prev", "curr", "next", "i", "big", "f"],
    ),
    ("18_crlf_endings.c", &["celsius", "fahrenheit"]),
    ("19_bitops.c", &["ones", "flags", "toggled", "weight"]),
    ("20_stack.c", &["st", "popped", "round"]),
    (
        "21_binary_search.c",
        &["low", "high", "mid", "table", "where"],
    ),
    (
        "22_word_count.c",
        &["ch", "lines", "words", "chars", "in_word"],
    ),
    (
        "23_hex_dump.c",
        &["digits", "offset", "byte", "sample", "fill"],
    ),
];

/// Tokens changed between cover and stego body, checked to be single
/// trailing-underscore renames of identifiers.
fn renamed_tokens(
    label: &str,
    cover: &[u8],
    stego: &[u8],
) -> Result<(Vec<usize>, Vec<u8>), String> {
    let crlf = |doc: &[u8]| {
        doc.iter()
            .position(|&b| b == b'\n')
            .is_some_and(|p| p > 0 && doc[p - 1] == b'\r')
    };
    ensure!(
        crlf(cover) == crlf(stego),
        "{label}: stego comment line ending differs from the cover's"
    );
    let newline = stego
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| format!("{label}: stego has no first line"))?;
    let header = stego[..newline]
        .strip_suffix(b"\r")
        .unwrap_or(&stego[..newline])
        .to_vec();
    let body = &stego[newline + 1..];
    let c = ident::lex(cover).map_err(|e| format!("{label}: {e}"))?;
    let s = ident::lex(body).map_err(|e| format!("{label}: stego does not lex: {e}"))?;
    ensure!(
        c.len() == s.len(),
        "{label}: token count {} became {}",
        c.len(),
        s.len()
    );
    let mut changed = Vec::new();
    for (n, (a, b)) in c.iter().zip(&s).enumerate() {
        ensure!(
            a.kind == b.kind,
            "{label}: token {n} kind {:?} became {:?}",
            a.kind,
            b.kind
        );
        if a.text != b.text {
            ensure!(
                a.kind == CKind::Identifier && b.text == [a.text, b"_"].concat(),
                "{label}: token {n} {:?} became {:?}",
                String::from_utf8_lossy(a.text),
                String::from_utf8_lossy(b.text)
            );
            changed.push(n);
        }
    }
    Ok((changed, header))
}

fn criterion_6() -> Outcome {
    let corpus = fixtures("c");
    ensure!(
        corpus.len() >= 20,
        "need at least 20 C fixtures, found {}",
        corpus.len()
    );
    let labelled: BTreeMap<&str, &[&str]> = C_CANDIDATES.iter().copied().collect();
    let mut rng = StdRng::seed_from_u64(0x0C0C);
    let mut trials = 0;
    for (name, cover) in &corpus {
        let expected = labelled
            .get(name.as_str())
            .ok_or_else(|| format!("{name}: not labelled"))?;
        let tokens = ident::lex(cover).map_err(|e| format!("{name}: {e}"))?;
        let analysis =
            ident::find_candidates(&tokens, NameMode::Cover).map_err(|e| format!("{name}: {e}"))?;
        let found: Vec<&str> = analysis
            .candidates
            .iter()
            .map(|c| analysis.candidate_name(c))
            .collect();
        ensure!(
            found == *expected,
            "{name}: candidates {found:?}, expected {expected:?}"
        );
        let capacity = ident::capacity(cover).map_err(|e| e.to_string())?;
        ensure!(capacity == expected.len(), "{name}: capacity {capacity}");

        // all ones: every use of a carrier name is renamed except member access
        let ones: BitVector = (0..capacity).map(|_| true).collect();
        let stego = ident::embed(cover, &ones, None).map_err(|e| format!("{name}: {e}"))?;
        let (changed, header) = renamed_tokens(name, cover, &stego)?;
        ensure!(
            header == format!("/* stego:k={capacity} */").as_bytes(),
            "{name}: bad stego comment"
        );
        let names: HashSet<&[u8]> = expected.iter().map(|n| n.as_bytes()).collect();
        let oracle: Vec<usize> = (0..tokens.len())
            .filter(|&i| tokens[i].kind == CKind::Identifier && names.contains(tokens[i].text))
            .filter(|&i| {
                let prev = tokens[..i].iter().rev().find(|t| !t.is_trivia());
                !prev.is_some_and(|t| t.is(".") || t.is("->"))
            })
            .collect();
        ensure!(
            changed == oracle,
            "{name}: all-ones renamed tokens {changed:?}, expected {oracle:?}"
        );
        ensure!(
            ident::extract_bits(&stego, None).map_err(|e| e.to_string())? == ones,
            "{name}: ones lost"
        );

        // all zeros leaves the body untouched
        let zeros: BitVector = (0..capacity).map(|_| false).collect();
        let stego = ident::embed(cover, &zeros, None).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            renamed_tokens(name, cover, &stego)?.0.is_empty(),
            "{name}: zeros renamed something"
        );

        for _ in 0..8 {
            let len = rng.gen_range(0..=capacity);
            let payload = random_bits(&mut rng, len);
            let key = rng.gen_bool(0.5).then(|| random_key(&mut rng));
            let (stego, table) = ident::embed_with_table(cover, &payload, key.as_ref())
                .map_err(|e| format!("{name}: {e}"))?;
            let back =
                ident::extract_bits(&stego, key.as_ref()).map_err(|e| format!("{name}: {e}"))?;
            ensure!(back == payload, "{name}: payload not recovered");
            let (changed, _) = renamed_tokens(name, cover, &stego)?;
            let mut wanted: Vec<usize> = analysis
                .candidates
                .iter()
                .filter(|c| table.symbol(c.symbol).rename.is_some())
                .flat_map(|c| analysis.occurrences(&tokens, c))
                .collect();
            wanted.sort_unstable();
            ensure!(
                changed == wanted,
                "{name}: renamed {changed:?}, occurrences {wanted:?}"
            );
            let report = verify_invariance(cover, &stego, Channel::Ident);
            ensure!(report.holds, "{name}: {}", report.detail);
            trials += 1;
        }
    }

    let worked = ident::embed(
        b"int main(){ int var; var=1; }",
        &"1".parse().unwrap(),
        None,
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        worked == b"/* stego:k=1 */\nint main(){ int var_; var_=1; }",
        "worked example gave {}",
        String::from_utf8_lossy(&worked)
    );
    for ambiguous in [
        &b"int main(void){ int count_; count_ = 0; return count_; }"[..],
        b"static int hits_;\nint main(void){ int a = 1; return a; }",
        b"/* stego:k=1 */\nint main(void){ int a = 1; return a; }",
    ] {
        match ident::embed(ambiguous, &BitVector::new(), None) {
            Err(e) if e.code() == "E_AMBIGUOUS_COVER" => {}
            other => return Err(format!("ambiguous cover accepted: {other:?}")),
        }
    }
    Ok(format!(
        "{} fixtures, {trials} keyed/plain round trips, worked example and rejection ok",
        corpus.len()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 7: identifier automaton

fn criterion_7() -> Outcome {
    let reference = Regex::new(r"^[a-zA-Z_][a-zA-Z0-9_]+$").unwrap();
    let alphabet = *b"aZ09_-";
    let mut strings: Vec<Vec<u8>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..4 {
        frontier = frontier
            .iter()
            .flat_map(|s| alphabet.iter().map(move |&c| [s.as_slice(), &[c]].concat()))
            .collect();
        strings.extend(frontier.iter().cloned());
    }
    let non_empty = strings.len() - 1;
    ensure!(non_empty == 1554, "enumerated {non_empty} strings");
    let mut accepted = 0;
    for s in &strings {
        let want = reference.is_match(std::str::from_utf8(s).unwrap());
        let got = ident::match_identifier(s);
        ensure!(
            got == want,
            "{:?}: automaton {got}, reference {want}",
            String::from_utf8_lossy(s)
        );
        accepted += usize::from(got);
    }
    Ok(format!("{non_empty} strings agree ({accepted} accepted)"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let html_run = html_trials();
    let criteria: Vec<Criterion> = vec![
        ("html round-trip", Box::new(|| criterion_1(&html_run))),
        ("case-fold invariance", Box::new(|| criterion_2(&html_run))),
        (
            "histogram conservation",
            Box::new(|| criterion_3(&html_run)),
        ),
        ("header and tag examples", Box::new(criterion_4)),
        ("caseless channel", Box::new(criterion_5)),
        ("identifier channel", Box::new(criterion_6)),
        ("identifier automaton", Box::new(criterion_7)),
        ("capacity formula", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
