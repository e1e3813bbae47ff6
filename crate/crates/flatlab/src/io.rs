//! Text file formats.
//!
//! Truth table: line 1 `p r n`; line 2 the `r+1` modulus coefficients
//! low-to-high (present iff `r > 1`); then `q^n` integers in `[0, q)` in
//! canonical point order, whitespace separated.
//!
//! Flat set: line 1 `p r n t`; modulus line iff `r > 1`; then one flat per
//! line as `base | b1 ; b2 ; ...`, each point written as its canonical
//! integer encoding.
//!
//! Base code: line 1 `p r t`; modulus line iff `r > 1`; then one monomial
//! per line as `t` space-separated exponents in `[0, q)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::flats::{canonicalize, FlatSet};
use crate::gf::{FieldElement, FieldSpec};
use crate::lifted::BaseCode;
use crate::poly::{decode_point, encode_point, Monomial, TruthTable};
use crate::Error;

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

struct TokenReader {
    tokens: Vec<String>,
    pos: usize,
}

impl TokenReader {
    fn from_text(text: &str) -> TokenReader {
        TokenReader {
            tokens: text.split_whitespace().map(str::to_owned).collect(),
            pos: 0,
        }
    }

    fn next_u64(&mut self, path: &Path, what: &str) -> Result<u64, Error> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| parse_err(path, format!("unexpected end of file, wanted {what}")))?;
        self.pos += 1;
        tok.parse::<u64>()
            .map_err(|_| parse_err(path, format!("bad {what}: {tok:?}")))
    }

    fn finished(&self) -> bool {
        self.pos == self.tokens.len()
    }
}

fn field_header(field: &FieldSpec) -> String {
    let mut out = String::new();
    if field.r() > 1 {
        let coeffs: Vec<String> = field.modulus().iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", coeffs.join(" ")).unwrap();
    }
    out
}

pub fn write_truth_table(path: &Path, table: &TruthTable) -> Result<(), Error> {
    let mut out = format!("{} {} {}\n", table.field.p(), table.field.r(), table.n);
    out.push_str(&field_header(&table.field));
    let q = table.field.q() as usize;
    let per_line = q.pow(table.n.min(1) as u32).max(16);
    for chunk in table.values.chunks(per_line) {
        let line: Vec<String> = chunk.iter().map(|v| v.value().to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_truth_table(path: &Path) -> Result<TruthTable, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut reader = TokenReader::from_text(&text);
    let p = reader.next_u64(path, "prime p")? as u16;
    let r = reader.next_u64(path, "extension degree r")? as u16;
    let n = reader.next_u64(path, "dimension n")? as usize;
    let modulus = if r > 1 {
        let mut m = Vec::with_capacity(r as usize + 1);
        for _ in 0..=r {
            m.push(reader.next_u64(path, "modulus coefficient")? as u16);
        }
        m
    } else {
        Vec::new()
    };
    let field = FieldSpec::with_modulus(p, r, modulus).map_err(|e| parse_err(path, e.to_string()))?;
    let size = (field.q() as u64).pow(n as u32) as usize;
    let mut values = Vec::with_capacity(size);
    for _ in 0..size {
        let v = reader.next_u64(path, "table value")?;
        if v >= field.q() as u64 {
            return Err(parse_err(path, format!("value {v} out of range for q = {}", field.q())));
        }
        values.push(FieldElement(v as u16));
    }
    if !reader.finished() {
        return Err(parse_err(path, "trailing tokens after table values"));
    }
    TruthTable::new(field, n, values).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_flat_set(path: &Path, set: &FlatSet) -> Result<(), Error> {
    let mut out = format!(
        "{} {} {} {}\n",
        set.field.p(),
        set.field.r(),
        set.n,
        set.t
    );
    out.push_str(&field_header(&set.field));
    for member in &set.members {
        let base = encode_point(&set.field, member.base());
        let dirs: Vec<String> = member
            .basis()
            .iter()
            .map(|b| encode_point(&set.field, b).to_string())
            .collect();
        writeln!(out, "{} | {}", base, dirs.join(" ; ")).unwrap();
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_flat_set(path: &Path) -> Result<FlatSet, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, "missing header"))?;
    let mut head = TokenReader::from_text(header);
    let p = head.next_u64(path, "prime p")? as u16;
    let r = head.next_u64(path, "extension degree r")? as u16;
    let n = head.next_u64(path, "dimension n")? as usize;
    let t = head.next_u64(path, "flat dimension t")? as usize;
    let modulus = if r > 1 {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(path, "missing modulus line"))?;
        let mut m = TokenReader::from_text(line);
        let mut coeffs = Vec::with_capacity(r as usize + 1);
        for _ in 0..=r {
            coeffs.push(m.next_u64(path, "modulus coefficient")? as u16);
        }
        coeffs
    } else {
        Vec::new()
    };
    let field = FieldSpec::with_modulus(p, r, modulus).map_err(|e| parse_err(path, e.to_string()))?;
    let mut set = FlatSet::empty(field.clone(), n, t);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (base_txt, dirs_txt) = line
            .split_once('|')
            .ok_or_else(|| parse_err(path, format!("flat line without '|': {line:?}")))?;
        let decode = |txt: &str| -> Result<Vec<FieldElement>, Error> {
            let idx: usize = txt
                .trim()
                .parse()
                .map_err(|_| parse_err(path, format!("bad point encoding {txt:?}")))?;
            if idx >= (field.q() as usize).pow(n as u32) {
                return Err(parse_err(path, format!("point {idx} out of range")));
            }
            let mut pt = vec![FieldElement::ZERO; n];
            decode_point(&field, idx, &mut pt);
            Ok(pt)
        };
        let base = decode(base_txt)?;
        let dirs_txt = dirs_txt.trim();
        let dirs: Vec<Vec<FieldElement>> = if dirs_txt.is_empty() {
            Vec::new()
        } else {
            dirs_txt
                .split(';')
                .map(decode)
                .collect::<Result<_, _>>()?
        };
        if dirs.len() != t {
            return Err(parse_err(path, format!("expected {t} directions, got {}", dirs.len())));
        }
        let flat = canonicalize(&field, base, dirs).map_err(|e| parse_err(path, e.to_string()))?;
        set.members.insert(flat);
    }
    Ok(set)
}

pub fn write_base_code(path: &Path, code: &BaseCode) -> Result<(), Error> {
    let mut out = format!("{} {} {}\n", code.field.p(), code.field.r(), code.t);
    out.push_str(&field_header(&code.field));
    for m in code.support() {
        let exps: Vec<String> = m.0.iter().map(|e| e.to_string()).collect();
        writeln!(out, "{}", exps.join(" ")).unwrap();
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_base_code(path: &Path) -> Result<BaseCode, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut reader = TokenReader::from_text(&text);
    let p = reader.next_u64(path, "prime p")? as u16;
    let r = reader.next_u64(path, "extension degree r")? as u16;
    let t = reader.next_u64(path, "base dimension t")? as usize;
    let modulus = if r > 1 {
        let mut m = Vec::with_capacity(r as usize + 1);
        for _ in 0..=r {
            m.push(reader.next_u64(path, "modulus coefficient")? as u16);
        }
        m
    } else {
        Vec::new()
    };
    let field = FieldSpec::with_modulus(p, r, modulus).map_err(|e| parse_err(path, e.to_string()))?;
    let mut support = Vec::new();
    while !reader.finished() {
        let mut exps = Vec::with_capacity(t);
        for _ in 0..t {
            let e = reader.next_u64(path, "exponent")?;
            if e >= field.q() as u64 {
                return Err(parse_err(path, format!("exponent {e} not reduced for q = {}", field.q())));
            }
            exps.push(e as u16);
        }
        support.push(Monomial(exps));
    }
    BaseCode::new(field, t, support).map_err(|e| parse_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flats::enumerate_flats;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    #[test]
    fn truth_table_round_trip() {
        let dir = tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, r, n) in [(2u16, 1u16, 3usize), (3, 1, 2), (2, 2, 2)] {
            let field = FieldSpec::new(p, r).unwrap();
            let table = crate::generate::random_function(&field, n, &mut rng);
            let path = dir.path().join(format!("t_{p}_{r}_{n}.tt"));
            write_truth_table(&path, &table).unwrap();
            let back = read_truth_table(&path).unwrap();
            assert_eq!(back, table);
        }
    }

    #[test]
    fn truth_table_rejects_garbage() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.tt");
        std::fs::write(&path, "2 1 2\n0 1 5 0\n").unwrap();
        assert!(read_truth_table(&path).is_err());
        std::fs::write(&path, "2 1 2\n0 1\n").unwrap();
        assert!(read_truth_table(&path).is_err());
        std::fs::write(&path, "4 1 2\n0 0 0 0\n").unwrap();
        assert!(read_truth_table(&path).is_err());
    }

    #[test]
    fn flat_set_round_trip() {
        let dir = tempdir().unwrap();
        let field = FieldSpec::new(3, 1).unwrap();
        let members: Vec<_> = enumerate_flats(&field, 3, 1, 1000)
            .unwrap()
            .into_iter()
            .step_by(7)
            .collect();
        let set = FlatSet::from_members(field, 3, 1, members).unwrap();
        let path = dir.path().join("set.flats");
        write_flat_set(&path, &set).unwrap();
        let back = read_flat_set(&path).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn base_code_fixtures_parse_and_validate() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for name in [
            "rm_q2_t2_d1.bc",
            "rm_q3_t2_d2.bc",
            "rm_q4_t2_d2.bc",
            "constants_q2_t2.bc",
            "full_q2_t2.bc",
        ] {
            let code = read_base_code(&dir.join(name)).unwrap();
            assert_eq!(code.t, 2, "{name}");
        }
        // the Reed-Muller fixtures agree with the constructor
        let rm = read_base_code(&dir.join("rm_q2_t2_d1.bc")).unwrap();
        let field = FieldSpec::new(2, 1).unwrap();
        let built = BaseCode::reed_muller(&field, 2, 1).unwrap();
        assert_eq!(rm.support_set(), built.support_set());
        let rm9 = read_base_code(&dir.join("rm_q3_t2_d2.bc")).unwrap();
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(
            rm9.support_set(),
            BaseCode::reed_muller(&f3, 2, 2).unwrap().support_set()
        );
    }

    #[test]
    fn base_code_round_trip() {
        let dir = tempdir().unwrap();
        let field = FieldSpec::new(2, 1).unwrap();
        let code = BaseCode::reed_muller(&field, 2, 1).unwrap();
        let path = dir.path().join("rm.bc");
        write_base_code(&path, &code).unwrap();
        let back = read_base_code(&path).unwrap();
        assert_eq!(back.support_set(), code.support_set());
    }
}
