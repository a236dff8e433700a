//! Acceptance checks. One PASS/FAIL line per criterion; exits non-zero if
//! any fail.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use touchboard_core::device::{run_trace, ButtonId, DeviceConfig, EventKind, FrameLog, PowerState};
use touchboard_core::evalstats::{
    difficulty_means, solve_lambda, subgroup_resample, survey_stats, DiscoveryMatrix,
    DiscoveryModel, LikertBand,
};
use touchboard_core::render::{
    apply_stroke_step, stamp, Framebuffer, PenColor, PenMode, Pixel, BACKGROUND, FB_HEIGHT,
    FB_WIDTH,
};
use touchboard_core::touch_path::{
    deserialize_conversion, serialize_conversion, Adc12, Channel, TouchSample,
};
use touchboard_core::trace::parse_trace;
use touchboard_core::video_out::{count_frames, VgaTimingParams};
use touchboard_core::{fixtures, Execution};

/// Slack for comparisons whose tolerance edge is hit exactly.
const EPS: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol + EPS {
        Ok(())
    } else {
        Err(format!("{name}: got {got}, want {want} ± {tol}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn under(name: &str, took: Duration, limit: Duration) -> Result<(), String> {
    ensure(took < limit, || {
        format!("{name} took {took:?}, limit {limit:?}")
    })
}

const TASK_TIME_MEANS: [f64; 8] = [23.60, 21.95, 17.05, 18.75, 18.90, 18.30, 17.35, 15.10];
const TASK_TIME_OVERALL: f64 = 18.87;
const DIFFICULTY_MEANS: [f64; 8] = [3.25, 3.15, 4.05, 4.45, 3.70, 4.30, 3.80, 3.45];
const DIFFICULTY_OVERALL: f64 = 3.76;
const SURVEY_EXPECTED: [(&str, [f64; 5], f64); 3] = [
    ("subservientness", [2.45, 2.55, 2.45, 2.30, 2.50], 2.45),
    ("user-friendliness", [2.50, 2.35, 2.25, 2.55, 2.20], 2.37),
    ("usability", [2.50, 2.50, 2.45, 2.60, 2.40], 2.49),
];

fn task_times() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_touchboard"))
        .args(["evalstats", "times", "--fixtures", "--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(out.status.success(), || {
        format!("exit {:?}", out.status.code())
    })?;
    let text = String::from_utf8_lossy(&out.stdout);
    // task,label,mean,mean_2dp; the label may hold commas, the numbers never do
    let means: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.rsplitn(3, ',');
            it.next();
            it.next()
                .and_then(|m| m.parse().ok())
                .ok_or_else(|| format!("bad row `{l}`"))
        })
        .collect::<Result<_, _>>()?;
    ensure(means.len() == 9, || format!("{} rows", means.len()))?;
    for (i, (&got, &want)) in means.iter().zip(&TASK_TIME_MEANS).enumerate() {
        within(&format!("task {}", i + 1), got, want, 0.005)?;
    }
    within("overall", means[8], TASK_TIME_OVERALL, 0.005)?;
    under("evalstats times", took, Duration::from_secs(1))?;
    Ok(format!("overall {:.4} in {took:.0?}", means[8]))
}

fn task_difficulty() -> Outcome {
    let r = difficulty_means(&fixtures::task_difficulty()).map_err(|e| e.to_string())?;
    for (i, (&got, &want)) in r.per_task.iter().zip(&DIFFICULTY_MEANS).enumerate() {
        within(&format!("task {}", i + 1), got, want, 0.005)?;
    }
    ensure(r.per_task.len() == 8, || {
        format!("{} tasks", r.per_task.len())
    })?;
    within("overall", r.overall, DIFFICULTY_OVERALL, 0.02)?;
    Ok(format!("overall {:.5}", r.overall))
}

fn surveys() -> Outcome {
    let mut notes = Vec::new();
    for (factor, items, overall) in SURVEY_EXPECTED {
        let t = fixtures::survey(factor).ok_or("missing fixture")?;
        let r = survey_stats(&t).map_err(|e| e.to_string())?;
        ensure(r.items.len() == items.len(), || {
            format!("{factor}: {} items", r.items.len())
        })?;
        for (i, (s, &want)) in r.items.iter().zip(&items).enumerate() {
            within(&format!("{factor} item {}", i + 1), s.mean, want, 0.005)?;
        }
        within(&format!("{factor} overall"), r.overall.mean, overall, 0.005)?;
        ensure(r.band == LikertBand::Yes, || {
            format!("{factor}: band {}", r.band.name())
        })?;
        notes.push(format!("{:.2}", r.overall.mean));
    }
    Ok(format!("overall {} band Yes", notes.join("/")))
}

fn discovery() -> Outcome {
    let l = solve_lambda(0.75, 5).map_err(|e| e.to_string())?;
    within("lambda", l, 0.242142, 1e-5)?;
    let p = DiscoveryModel::new(0.31)
        .map_err(|e| e.to_string())?
        .proportion(5);
    within("proportion", p, 0.84357, 1e-4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let lam = rng.gen_range(1e-6..1.0 - 1e-6);
        let n = rng.gen_range(0..200u32);
        let m = DiscoveryModel::new(lam).map_err(|e| e.to_string())?;
        let (a, b) = (m.proportion(n), m.proportion(n + 1));
        ensure((0.0..=1.0).contains(&a) && a <= b, || {
            format!("λ={lam} n={n}: {a} > {b}")
        })?;
        let bigger = DiscoveryModel::new((lam + 0.01).min(0.999_999)).map_err(|e| e.to_string())?;
        ensure(bigger.proportion(n) >= a, || {
            format!("not monotone in λ at {lam}, {n}")
        })?;
    }
    Ok(format!("lambda {l:.6} p(0.31,5) {p:.5}"))
}

fn resampling() -> Outcome {
    let d = DiscoveryMatrix::synthetic(60, 40, 0.3, 0x7b0a_2d5e).map_err(|e| e.to_string())?;
    let full = subgroup_resample(&d, 60, 200, 1, Execution::Parallel).map_err(|e| e.to_string())?;
    within("full min", full.min_pct, 100.0, 0.0)?;
    within("full mean", full.mean_pct, 100.0, 0.0)?;
    within("full std", full.std_pct, 0.0, 0.0)?;
    let rows = [5, 10, 15, 20, 30, 40, 50]
        .iter()
        .map(|&k| subgroup_resample(&d, k, 1000, 0x7b0a_2d5e, Execution::Parallel))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    for w in rows.windows(2) {
        ensure(w[0].mean_pct <= w[1].mean_pct, || {
            format!("mean% falls from k={} to k={}", w[0].k, w[1].k)
        })?;
        ensure(w[0].std_pct >= w[1].std_pct, || {
            format!("std% rises from k={} to k={}", w[0].k, w[1].k)
        })?;
    }
    Ok(format!(
        "k=5 mean {:.2} std {:.2}; k=50 mean {:.2} std {:.2}",
        rows[0].mean_pct, rows[0].std_pct, rows[6].mean_pct, rows[6].std_pct
    ))
}

fn spi_round_trip() -> Outcome {
    let start = Instant::now();
    for ch in [Channel::X, Channel::Y] {
        for code in 0..4096u16 {
            let a = Adc12::new(code).map_err(|e| e.to_string())?;
            let t = serialize_conversion(a, ch);
            // independent read of the wire: 12 data bits after the busy slot
            let bits = t.clocked_bits();
            let wire = bits[9..21]
                .iter()
                .fold(0u16, |acc, &b| (acc << 1) | b as u16);
            ensure(wire == code && !bits[8], || {
                format!("{ch:?} {code}: wire {wire}")
            })?;
            ensure(deserialize_conversion(&t) == Ok(a), || {
                format!("{ch:?} {code}: decode")
            })?;
        }
    }
    let took = start.elapsed();
    under("round trip", took, Duration::from_secs(1))?;
    Ok(format!("8192 transactions in {took:.0?}"))
}

fn vga_timing() -> Outcome {
    let start = Instant::now();
    let p = VgaTimingParams::default();
    let c = count_frames(&p, 1);
    let took = start.elapsed();
    ensure(c.ticks == 663_168, || format!("ticks {}", c.ticks))?;
    ensure(c.hsync_pulses == 628, || {
        format!("hsync {}", c.hsync_pulses)
    })?;
    ensure(c.vsync_pulses == 1, || format!("vsync {}", c.vsync_pulses))?;
    ensure(c.active_pixels == 480_000, || {
        format!("active {}", c.active_pixels)
    })?;
    let hz = p.pixel_clock_hz as f64 / c.ticks as f64;
    within("refresh", hz, 60.32, 0.01)?;
    under("one frame", took, Duration::from_secs(5))?;
    Ok(format!("{} ticks {hz:.4} Hz in {took:.0?}", c.ticks))
}

fn log_index(events: &[touchboard_core::device::TraceEvent], b: ButtonId) -> Result<usize, String> {
    events
        .iter()
        .position(|e| e.kind == EventKind::Button(b))
        .ok_or_else(|| format!("no {b} event"))
}

fn tasks8() -> Outcome {
    let events = parse_trace(fixtures::TASKS8_TRACE).map_err(|e| e.to_string())?;
    let runs: Vec<(PowerState, usize, FrameLog)> = (0..3)
        .map(|_| {
            run_trace(&events, DeviceConfig::default())
                .map(|(s, log)| (s.power(), s.framebuffer().non_background_count(), log))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let (power, inked, log) = &runs[0];
    ensure(*power == PowerState::Off, || {
        format!("ends {}", power.name())
    })?;
    ensure(*inked == 0, || format!("{inked} inked pixels at the end"))?;
    let text = log.to_string();
    ensure(runs.iter().all(|r| r.2.to_string() == text), || {
        "frame logs differ".into()
    })?;

    let hash = |b| log_index(&events, b).map(|i| log.entries[i].fb_hash);
    // each mode button is logged before its own strokes land
    let before_draw = hash(ButtonId::Draw)?;
    let after_draw = hash(ButtonId::Erase)?;
    let after_erase = hash(ButtonId::DrawBold)?;
    let after_bold = hash(ButtonId::EraseBold)?;
    let after_bold_erase = hash(ButtonId::ColorToggle)?;
    ensure(after_draw != before_draw, || "draw task left no ink".into())?;
    ensure(after_erase == before_draw, || {
        "erase did not restore the board".into()
    })?;
    ensure(after_bold != after_erase, || {
        "bold draw task left no ink".into()
    })?;
    ensure(after_bold_erase == after_erase, || {
        "bold erase did not restore the board".into()
    })?;
    Ok(format!(
        "{} events, log {} bytes, 3 identical runs",
        events.len(),
        text.len()
    ))
}

fn random_sample(rng: &mut ChaCha8Rng, seq: u64) -> TouchSample {
    const EDGE: [u16; 6] = [0, 1, 5, 4090, 4094, 4095];
    let code = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.3) {
            EDGE[rng.gen_range(0..EDGE.len())]
        } else {
            rng.gen_range(0..4096)
        }
    };
    TouchSample {
        pen_down: true,
        x: Adc12::new(code(rng)).unwrap(),
        y: Adc12::new(code(rng)).unwrap(),
        seq,
    }
}

/// A pen-like path: short hops from a start that often sits on an edge,
/// with occasional snaps onto the border.
fn random_walk(rng: &mut ChaCha8Rng, len: u64) -> Vec<TouchSample> {
    let mut cur = random_sample(rng, 0);
    let mut out = vec![cur];
    for seq in 1..len {
        let hop = |c: Adc12, rng: &mut ChaCha8Rng| {
            let v = match rng.gen_range(0..24) {
                0 => 0,
                1 => 4095,
                _ => (c.code() as i32 + rng.gen_range(-300..=300)).clamp(0, 4095),
            };
            Adc12::new(v as u16).unwrap()
        };
        cur = TouchSample {
            pen_down: true,
            x: hop(cur.x, rng),
            y: hop(cur.y, rng),
            seq,
        };
        out.push(cur);
    }
    out
}

fn pixel_of(s: &TouchSample) -> (i64, i64) {
    (
        s.x.code() as i64 * FB_WIDTH as i64 / 4096,
        s.y.code() as i64 * FB_HEIGHT as i64 / 4096,
    )
}

const MODES: [PenMode; 4] = [
    PenMode::Draw,
    PenMode::Erase,
    PenMode::DrawBold,
    PenMode::EraseBold,
];

/// Draws one random path on a blank surface, then wipes the path's clipped
/// bounding box by hand. Ink left behind anywhere means a stray write;
/// the caller checks for that every batch.
fn stroke_in_box(rng: &mut ChaCha8Rng, fb: &mut Framebuffer) -> Result<(), String> {
    let mode = if rng.gen_bool(0.5) {
        PenMode::DrawBold
    } else {
        PenMode::Draw
    };
    let r = mode.kernel_radius() as i64;
    let len = rng.gen_range(1..8);
    let path = random_walk(rng, len);
    let pts: Vec<_> = path.iter().map(pixel_of).collect();
    let lo_c = (pts.iter().map(|p| p.0).min().unwrap() - r).max(0);
    let hi_c = (pts.iter().map(|p| p.0).max().unwrap() + r).min(FB_WIDTH as i64 - 1);
    let lo_r = (pts.iter().map(|p| p.1).min().unwrap() - r).max(0);
    let hi_r = (pts.iter().map(|p| p.1).max().unwrap() + r).min(FB_HEIGHT as i64 - 1);
    let drawn = panic::catch_unwind(AssertUnwindSafe(|| {
        let mut prev: Option<&TouchSample> = None;
        for s in &path {
            apply_stroke_step(fb, prev, s, mode, PenColor::Blue).map_err(|e| e.to_string())?;
            prev = Some(s);
        }
        Ok::<_, String>(())
    }));
    drawn.map_err(|_| format!("panic drawing {pts:?}"))??;
    ensure(fb.cells().len() == FB_WIDTH * FB_HEIGHT, || {
        "surface resized".into()
    })?;
    let mut inked = 0;
    for row in lo_r..=hi_r {
        for col in lo_c..=hi_c {
            let p = Pixel::new(col as u32, row as u32).map_err(|e| e.to_string())?;
            inked += (fb.get(p) != BACKGROUND) as usize;
            fb.set(p, BACKGROUND);
        }
    }
    ensure(inked > 0, || format!("path {pts:?} drew nothing"))
}

fn render_properties() -> Outcome {
    // explicit corners first: the kernel keeps only its on-surface quarter
    let mut fb = Framebuffer::new();
    for (c, r) in [(0, 0), (799, 0), (0, 399), (799, 399)] {
        for (mode, side) in [(PenMode::Draw, 2), (PenMode::DrawBold, 4)] {
            fb.clear();
            stamp(&mut fb, Pixel::new(c, r).unwrap(), mode, PenColor::Red);
            let n = fb.non_background_count();
            ensure(n == side * side, || {
                format!("{mode:?} at ({c}, {r}) inked {n}")
            })?;
        }
    }

    let threads = 4;
    let per = 10_000 / threads;
    let stroke_result: Result<(), String> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(100 + t as u64);
                    let mut fb = Framebuffer::new();
                    for batch in 0..per / 100 {
                        for _ in 0..100 {
                            stroke_in_box(&mut rng, &mut fb)?;
                        }
                        let stray = fb.non_background_count();
                        ensure(stray == 0, || {
                            format!(
                                "worker {t} batch {batch}: {stray} cells inked outside their box"
                            )
                        })?;
                    }
                    Ok::<_, String>(())
                })
            })
            .collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().map_err(|_| "worker panicked".to_string())?)
    });
    stroke_result?;

    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let blank = Framebuffer::new().content_hash();
    for trial in 0..500 {
        let path: Vec<TouchSample> = (0..rng.gen_range(1..12))
            .map(|i| random_sample(&mut rng, i))
            .collect();
        let bold = rng.gen_bool(0.5);
        let (ink, rub) = if bold {
            (MODES[2], MODES[3])
        } else {
            (MODES[0], MODES[1])
        };
        let color = if rng.gen_bool(0.5) {
            PenColor::Red
        } else {
            PenColor::Blue
        };
        fb.clear();
        for mode in [ink, rub] {
            let mut prev: Option<&TouchSample> = None;
            for s in &path {
                apply_stroke_step(&mut fb, prev, s, mode, color).map_err(|e| e.to_string())?;
                prev = Some(s);
            }
            if mode == ink {
                ensure(fb.non_background_count() > 0, || {
                    format!("path {trial} drew nothing")
                })?;
            }
        }
        ensure(fb.content_hash() == blank, || {
            format!("path {trial} not erased")
        })?;
    }
    Ok("10000 strokes in bounds, 500 paths inverted".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("task time means", task_times),
        ("task difficulty means", task_difficulty),
        ("survey means and bands", surveys),
        ("discovery model", discovery),
        ("subgroup resampling", resampling),
        ("SPI round trip", spi_round_trip),
        ("VGA timing", vga_timing),
        ("eight-task script", tasks8),
        ("render properties", render_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(note) => println!("PASS  {name:<24} {note} [{took:.0?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why} [{took:.0?}]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
