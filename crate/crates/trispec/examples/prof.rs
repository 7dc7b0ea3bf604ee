use trispec::enumerate::{self, conjugacy};
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sig_s = args.get(1).map(|s| s.as_str()).unwrap_or("2,5,inf");
    let l: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(6);
    let sig = trispec::fuchsian::Signature::parse(sig_s).unwrap();
    let group = trispec::fuchsian::TriangleGroup::new(sig, 128).unwrap();
    let t0 = std::time::Instant::now();
    let cfg = enumerate::EnumerationConfig::length(trispec::interval::rat_of(l, 1));
    let store = enumerate::enumerate_ball(&group, &cfg).unwrap();
    eprintln!("bfs: {} elements in {:?}; levels {}, r_cut {:.2}, rho {:.2}",
        store.len(), t0.elapsed(), store.stats.levels.len(), store.cfg.geometry.r_cut, store.cfg.geometry.rho);
    let t1 = std::time::Instant::now();
    let mut set = conjugacy::conjugacy_classes(&group, &store).unwrap();
    eprintln!("conjugacy: {} classes ({} candidates, pool {}) in {:?}",
        set.classes.len(), set.candidates, set.pool, t1.elapsed());
    let t2 = std::time::Instant::now();
    conjugacy::primitive_split(&group, &store, &mut set).unwrap();
    eprintln!("primitive split in {:?}; undecided {}", t2.elapsed(), set.undecided.len());
    let prim = set.classes.iter().filter(|c| c.primitive).count();
    eprintln!("primitive {} / {}", prim, set.classes.len());
}
