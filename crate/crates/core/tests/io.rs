use trendbreak::io::{ingest_csv, parse_csv, write_atomic, ColumnSpec};
use trendbreak::Error;

#[test]
fn header_and_date_labels() {
    let text = "Date,Open,Close\n2020-03-02,1,10\n2020-03-03,2,11\n2020-03-04,3,9\n2020-03-05,4,12\n2020-03-06,5,13\n";
    let y = parse_csv(text, None).unwrap();
    assert_eq!(y.values(), &[10.0, 11.0, 9.0, 12.0, 13.0]);
    assert_eq!(y.label(2), "2020-03-04");
    let open = parse_csv(text, Some(&"Open".parse().unwrap())).unwrap();
    assert_eq!(open.values()[4], 5.0);
    let by_index = parse_csv(text, Some(&ColumnSpec::Index(1))).unwrap();
    assert_eq!(by_index.values(), open.values());
}

#[test]
fn headerless_single_column() {
    let y = parse_csv("1\n2\n\n3\n4.5\n-6e1\n", None).unwrap();
    assert_eq!(y.values(), &[1.0, 2.0, 3.0, 4.5, -60.0]);
    assert!(y.labels().is_none());
}

#[test]
fn errors_name_the_row() {
    let err = parse_csv("v\n1\n2\nabc\n4\n5\n", None).unwrap_err();
    match err {
        Error::Input(msg) => assert!(msg.contains("row 4"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_csv("v\n1\n2\n", None), Err(Error::Input(_))));
    assert!(matches!(
        parse_csv("a,b\n1,2\n", Some(&"c".parse().unwrap())),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        parse_csv("v\n1\n2\nNaN\n4\n5\n", None),
        Err(Error::Input(_))
    ));
}

#[test]
fn atomic_write_replaces_contents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let csv = dir.path().join("in.csv");
    std::fs::write(&csv, "x\n1\n2\n3\n4\n5\n").unwrap();
    assert_eq!(ingest_csv(&csv, None).unwrap().len(), 5);
    assert!(ingest_csv(&dir.path().join("missing.csv"), None).is_err());
}
