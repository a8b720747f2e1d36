//! Regenerates `fixtures/*.dimer` from `fixtures/*.draw`.

use std::path::Path;

use dimerlab::drawing::compile_drawing;
use dimerlab::io::write_dimer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "draw"))
        .collect();
    paths.sort();
    for p in paths {
        let d = compile_drawing(&std::fs::read_to_string(&p)?)?;
        let out = p.with_extension("dimer");
        write_dimer(&d.model, &out)?;
        let r = d.model.validate();
        println!("{}: ok={} faces={} {:?}", out.display(), r.ok, r.num_faces, r.errors);
    }
    Ok(())
}
