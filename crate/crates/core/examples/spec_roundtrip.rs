//! Writes every catalog entry as a JSON spec, optionally into a directory
//! given on the command line, and checks it parses back unchanged.

use tfag::{catalog, spec};

fn main() -> tfag::Result<()> {
    let dir = std::env::args().nth(1);
    if let Some(d) = &dir {
        std::fs::create_dir_all(d).map_err(|err| tfag::Error::Parse(err.to_string()))?;
    }
    for e in catalog::all()? {
        let s = spec::from_entry(&e);
        let text = spec::emit_spec(&s);
        let back = spec::emit_spec(&spec::parse_spec(&text)?);
        println!(
            "{:<14} {} bytes, round trip {}",
            e.name,
            text.len(),
            if back == text { "ok" } else { "CHANGED" }
        );
        if let Some(d) = &dir {
            std::fs::write(format!("{d}/{}.json", e.name), &text).map_err(|err| tfag::Error::Parse(err.to_string()))?;
        }
    }
    Ok(())
}
