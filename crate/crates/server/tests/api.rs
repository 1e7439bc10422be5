use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use num_rational::BigRational;
use num_traits::One;
use schutte_core::dice::{DiceSet, Die};
use schutte_core::fixtures::builtin;
use schutte_core::wire::{AdviseResponse, Catalog, ErrorBody, SimulateResponse, TournamentsResponse};
use schutte_server::{router, AppState};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> axum::Router {
    let tied = DiceSet::new(
        "tied",
        vec![Die::new("x", vec![1]).unwrap(), Die::new("y", vec![1]).unwrap(), Die::new("z", vec![2]).unwrap()],
    )
    .unwrap();
    let mut sets = builtin();
    sets.push(tied);
    router(AppState::new(sets))
}

async fn call(req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn get(uri: &str) -> (StatusCode, Vec<u8>) {
    call(Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(uri: &str, body: Value) -> (StatusCode, Vec<u8>) {
    call(
        Request::post(uri).header(header::CONTENT_TYPE, "application/json").body(Body::from(body.to_string())).unwrap(),
    )
    .await
}

fn parse<T: DeserializeOwned>(bytes: &[u8]) -> T {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn sums_to_one(o: &schutte_core::wire::Odds) -> bool {
    let w = o.exact().unwrap();
    w.win + w.tie + w.loss == BigRational::one()
}

#[tokio::test]
async fn catalog_lists_fixture() {
    let (status, body) = get("/api/dice-sets").await;
    assert_eq!(status, StatusCode::OK);
    let cat: Catalog = parse(&body);
    let five = cat.sets.iter().find(|s| s.name == "five-dice").unwrap();
    assert_eq!(five.labels, ["A", "B", "C", "D", "E"]);
}

#[tokio::test]
async fn dice_set_file() {
    let (status, body) = get("/api/dice-sets/five-dice").await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = parse(&body);
    assert_eq!(v["dice"][1], json!({"label": "B", "faces": [0, 0, 30]}));
    assert_eq!(get("/api/dice-sets/nope").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn tournaments_with_exact_odds() {
    let (status, body) = get("/api/dice-sets/five-dice/tournaments?m=5").await;
    assert_eq!(status, StatusCode::OK);
    let resp: TournamentsResponse = parse(&body);
    assert_eq!(resp.tournaments.len(), 5);
    for (r, t) in resp.tournaments.iter().enumerate() {
        assert_eq!(t.edges.len(), 10);
        assert_eq!(t.edges.iter().filter(|e| e[0] == r).count(), 4);
        assert_eq!(t.pairs.len(), 10);
        assert!(t.pairs.iter().all(|p| sums_to_one(&p.odds)));
    }
    assert_eq!((resp.min_edge_probability.num.as_str(), resp.min_edge_probability.den.as_str()), ("8", "27"));
    let b_vs_c = &resp.tournaments[1].pairs.iter().find(|p| (p.i, p.j) == (1, 2)).unwrap().odds;
    assert_eq!((b_vs_c.win.num.as_str(), b_vs_c.win.den.as_str()), ("41", "81"));
}

#[tokio::test]
async fn tournaments_errors() {
    assert_eq!(get("/api/dice-sets/nope/tournaments?m=2").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get("/api/dice-sets/five-dice/tournaments").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(get("/api/dice-sets/five-dice/tournaments?m=x").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(get("/api/dice-sets/five-dice/tournaments?m=0").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(get("/api/dice-sets/five-dice/tournaments?m=65").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, body) = get("/api/dice-sets/tied/tournaments?m=1").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(parse::<ErrorBody>(&body).code, "tied_pair");
}

#[tokio::test]
async fn advise_four_opponents() {
    for (missing, rolls) in [("A", 1), ("B", 2), ("C", 3), ("D", 4), ("E", 5)] {
        let opponents: Vec<&str> = ["A", "B", "C", "D", "E"].into_iter().filter(|l| *l != missing).collect();
        let (status, body) = post("/api/advise", json!({"set": "five-dice", "opponents": opponents, "m": 5})).await;
        assert_eq!(status, StatusCode::OK);
        let resp: AdviseResponse = parse(&body);
        assert_eq!((resp.die.as_str(), resp.rolls), (missing, rolls));
        assert_eq!(resp.odds.len(), 4);
        for o in &resp.odds {
            assert!(sums_to_one(&o.odds));
            assert!(o.odds.win.exact().unwrap() > BigRational::new(1.into(), 2.into()));
        }
    }
}

#[tokio::test]
async fn advise_errors() {
    let (status, body) = post("/api/advise", json!({"set": "five-dice", "opponents": ["Q"], "m": 5})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(parse::<ErrorBody>(&body).code, "unknown_label");
    let (status, _) = post("/api/advise", json!({"set": "zzz", "opponents": ["A"], "m": 5})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = post("/api/advise", json!({"set": "five-dice", "opponents": "A"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(
        Request::post("/api/advise")
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from("{not json"))
            .unwrap(),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, body) = post("/api/advise", json!({"set": "five-dice", "opponents": ["A", "E"], "m": 1})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let err: ErrorBody = parse(&body);
    assert_eq!(err.code, "no_dominating_choice");
    let matrix = err.matrix.unwrap();
    assert_eq!(matrix.opponents, ["A", "E"]);
    assert_eq!(matrix.rows.len(), 3);
}

#[tokio::test]
async fn simulate_is_deterministic() {
    let req = json!({"set": "five-dice", "a": "A", "b": "B", "r": 1, "trials": 9000, "seed": 42});
    let (s1, b1) = post("/api/simulate", req.clone()).await;
    let (s2, b2) = post("/api/simulate", req).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(b1, b2);
    let resp: SimulateResponse = parse(&b1);
    assert_eq!(resp.wins + resp.ties + resp.losses, 9000);
    assert_eq!((resp.exact.win.num.as_str(), resp.exact.win.den.as_str()), ("2", "3"));
}

#[tokio::test]
async fn simulate_errors() {
    let base =
        |trials: u64, b: &str| json!({"set": "five-dice", "a": "A", "b": b, "r": 1, "trials": trials, "seed": 1});
    assert_eq!(post("/api/simulate", base(10, "Q")).await.0, StatusCode::NOT_FOUND);
    assert_eq!(post("/api/simulate", base(0, "B")).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(post("/api/simulate", base(u64::MAX, "B")).await.0, StatusCode::UNPROCESSABLE_ENTITY);
}

#[test]
fn fixture_directory_overrides() {
    let dir = std::env::temp_dir().join(format!("schutte-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("extra.json"),
        r#"{"name":"pair","dice":[{"label":"p","faces":[1,5]},{"label":"q","faces":[3]}]}"#,
    )
    .unwrap();
    std::fs::write(dir.join("notes.txt"), "ignored").unwrap();
    let state = AppState::load(Some(&dir)).unwrap();
    let rt = tokio::runtime::Runtime::new().unwrap();
    let body = rt.block_on(async {
        let resp = router(state).oneshot(Request::get("/api/dice-sets").body(Body::empty()).unwrap()).await.unwrap();
        resp.into_body().collect().await.unwrap().to_bytes()
    });
    let cat: Catalog = parse(&body);
    let names: Vec<&str> = cat.sets.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["five-dice", "pair"]);
    std::fs::write(dir.join("bad.json"), "{").unwrap();
    assert!(AppState::load(Some(&dir)).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
