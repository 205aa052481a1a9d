use posetgame::game::GameRng;
use posetgame::wgame::{
    random_family, play_wgame, FuzzPresenter, RecursivePainter, WGameOptions, WGameReproducer,
    WGameState, WWinner,
};
use rand::{Rng, SeedableRng};

fn games() -> usize {
    std::env::var("WGAME_FUZZ_GAMES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(150)
}

#[test]
fn painter_never_loses_on_random_families() {
    for w in 1..=4usize {
        let mut rng = GameRng::seed_from_u64(1000 + w as u64);
        let (mut fallback, mut passed, mut sealed) = (0, 0, 0);
        for g in 0..games() {
            let m = rng.gen_range(1..=48);
            let size = rng.gen_range(0..3 * m);
            let fam = random_family(m, w, size, &mut rng);
            assert!(fam.nested_depth() < w || fam.is_empty());
            let mix = [rng.gen_range(0.0..1.0), rng.gen_range(0.5..3.0), rng.gen_range(0.2..1.0)];
            let state = WGameState::new(m, 1 << (w - 1), Some(&fam));
            let mut painter = RecursivePainter::new(w, m, Some(&fam));
            let mut pres = FuzzPresenter::new(mix, 4 * m).with_nest_bias(if g % 2 == 0 { 0.6 } else { 0.0 });
            let opts = WGameOptions {
                audit: m <= 24,
                ..Default::default()
            };
            match play_wgame(state, &mut pres, &mut painter, &mut rng, &opts) {
                Ok((winner, _)) => assert_eq!(winner, WWinner::Painter, "w={w} game {g}"),
                Err(f) => {
                    let rep = WGameReproducer::from_failure(w, &fam, &f);
                    panic!("w={w} game {g}: {}\n{}", f.error, serde_json::to_string(&rep).unwrap());
                }
            }
            let t = painter.telemetry();
            fallback += t.fallback;
            passed += t.passed;
            sealed += t.sealed;
        }
        println!("w={w}: sealed {sealed}, passed down {passed}, fallback {fallback}");
    }
}
