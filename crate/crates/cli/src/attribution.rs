//! Attribution tables: one 0/1 column per factor (1 = factor absent) and a
//! `value` column. The set of absent factors is the coalition.

use std::path::Path;

use crate::fail::{CmdResult, Failure};
use crate::gamefile::{build_table, NamedGame};

pub fn parse(text: &str) -> CmdResult<NamedGame> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let bad = |e: csv::Error| Failure::input(format!("malformed attribution file: {e}"));
    let header: Vec<String> = reader
        .headers()
        .map_err(bad)?
        .iter()
        .map(String::from)
        .collect();
    let value_col = header
        .iter()
        .position(|h| h == "value")
        .ok_or_else(|| Failure::input("attribution file needs a 'value' column"))?;
    let factors: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != value_col)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(bad)?;
        let mut absent = Vec::new();
        let mut value = None;
        for (j, cell) in record.iter().enumerate() {
            if j == value_col {
                value = Some(cell.parse::<f64>().map_err(|_| {
                    Failure::input(format!("row {}: value '{cell}' is not a number", line + 1))
                })?);
                continue;
            }
            match cell {
                "1" => absent.push(header[j].clone()),
                "0" => {}
                _ => {
                    return Err(Failure::input(format!(
                        "row {}: column '{}' must be 0 or 1, got '{cell}'",
                        line + 1,
                        header[j]
                    )))
                }
            }
        }
        rows.push((absent, value.expect("value column present")));
    }
    let game = build_table(
        factors.len(),
        &factors,
        rows.iter()
            .map(|(a, v)| (a.iter().map(String::as_str).collect(), *v)),
    )?;
    Ok(NamedGame {
        game,
        names: factors,
    })
}

pub fn load(path: &Path) -> CmdResult<NamedGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_factor() {
        let g = parse("f,value\n0,0\n1,1\n").unwrap();
        assert_eq!(g.names, ["f"]);
        assert_eq!(g.game.grand_value(), 1.0);
    }

    #[test]
    fn incomplete_table_names_the_gap() {
        let err = parse("a,b,value\n1,0,1\n0,1,1\n").err().unwrap();
        assert!(err.message.contains("{a,b} is missing"), "{}", err.message);
    }

    #[test]
    fn bad_flag() {
        assert!(parse("a,value\n2,1\n").is_err());
        assert!(parse("a\n1\n").is_err());
    }
}
