import numpy as np
import pytest

from amrproj.cli import main
from amrproj.embeddings import EmbeddingCorpus, SentenceEmbedding, write_embeddings, write_token_file
from amrproj.treebank import read_treebank
from tests.test_wordalign import german_embeddings

FIG_BLOCK = """# ::id fig1
# ::tok The boy wants to go
(w / want-01
    :ARG0 (b / boy)
    :ARG1 (g / go-02
        :ARG0 b))
"""

WANT_BOY_BLOCK = "# ::id p1\n# ::tok boy wants\n(w / want-01\n    :ARG0 (b / boy))\n"
WANT_DOG_BLOCK = "# ::id p1\n# ::tok dog wants\n(v / want-01\n    :ARG0 (d / dog))\n"


def run(*argv):
    return main([str(a) for a in argv])


def write_corpus(path, matrices):
    sentences = [SentenceEmbedding(np.asarray(m, dtype=np.float32)) for m in matrices]
    dim = sentences[0].dim if sentences else 1
    write_embeddings(EmbeddingCorpus(dim, sentences), path)


@pytest.fixture
def german_setup(tmp_path):
    english, german = german_embeddings()
    write_token_file([["Establishing", "models", "in", "industrial", "Innovation"]],
                     tmp_path / "en.tok")
    write_token_file(
        [["Etablierung", "von", "Modellen", "in", "der", "industriellen", "Innovation"]],
        tmp_path / "de.tok",
    )
    write_corpus(tmp_path / "en.cemb", [english.vectors])
    write_corpus(tmp_path / "de.cemb", [german.vectors])
    return tmp_path


def test_align_words_intersect(german_setup, capsys):
    out = german_setup / "out.align"
    code = run(
        "--quiet", "align-words",
        "--src-tokens", german_setup / "en.tok", "--tgt-tokens", german_setup / "de.tok",
        "--src-emb", german_setup / "en.cemb", "--tgt-emb", german_setup / "de.cemb",
        "--mode", "intersect", "--output", out,
    )
    assert code == 0
    assert out.read_text(encoding="utf-8") == "0-0 1-2 2-3 4-6\n"


def test_align_words_directional_modes(german_setup):
    fe = german_setup / "fe.align"
    ef = german_setup / "ef.align"
    common = [
        "--quiet", "align-words",
        "--src-tokens", german_setup / "en.tok", "--tgt-tokens", german_setup / "de.tok",
        "--src-emb", german_setup / "en.cemb", "--tgt-emb", german_setup / "de.cemb",
    ]
    assert run(*common, "--mode", "fe", "--output", fe) == 0
    assert fe.read_text(encoding="utf-8") == "0-0 1-2 2-3 3-5 4-6\n"
    assert run(*common, "--mode", "ef", "--output", ef, "--with-scores") == 0
    line = ef.read_text(encoding="utf-8").strip()
    assert line.startswith("0-0 1-1 1-2 1-5 2-3 2-4 4-6 #scores")


def test_align_words_identity(tmp_path):
    rows = np.eye(3, dtype=np.float32)
    write_token_file([["a", "b", "c"]], tmp_path / "s.tok")
    write_token_file([["x", "y", "z"]], tmp_path / "t.tok")
    write_corpus(tmp_path / "s.cemb", [rows])
    write_corpus(tmp_path / "t.cemb", [rows])
    out = tmp_path / "o.align"
    assert run(
        "--quiet", "align-words",
        "--src-tokens", tmp_path / "s.tok", "--tgt-tokens", tmp_path / "t.tok",
        "--src-emb", tmp_path / "s.cemb", "--tgt-emb", tmp_path / "t.cemb",
        "--mode", "intersect", "--output", out,
    ) == 0
    assert out.read_text(encoding="utf-8") == "0-0 1-1 2-2\n"


def test_align_words_empty_corpus(tmp_path):
    write_token_file([], tmp_path / "s.tok")
    write_token_file([], tmp_path / "t.tok")
    write_corpus(tmp_path / "s.cemb", [])
    write_corpus(tmp_path / "t.cemb", [])
    out = tmp_path / "o.align"
    assert run(
        "--quiet", "align-words",
        "--src-tokens", tmp_path / "s.tok", "--tgt-tokens", tmp_path / "t.tok",
        "--src-emb", tmp_path / "s.cemb", "--tgt-emb", tmp_path / "t.cemb",
        "--output", out,
    ) == 0
    assert out.read_text(encoding="utf-8") == ""


def test_align_words_reports_mismatch(tmp_path, capsys):
    write_token_file([["a", "b"]], tmp_path / "s.tok")
    write_token_file([["x"]], tmp_path / "t.tok")
    write_corpus(tmp_path / "s.cemb", [np.eye(2, 3)])  # 2 rows for 2 tokens: fine
    write_corpus(tmp_path / "t.cemb", [np.ones((2, 3))])  # 2 rows for 1 token: error
    code = run(
        "--quiet", "align-words",
        "--src-tokens", tmp_path / "s.tok", "--tgt-tokens", tmp_path / "t.tok",
        "--src-emb", tmp_path / "s.cemb", "--tgt-emb", tmp_path / "t.cemb",
        "--output", tmp_path / "o.align",
    )
    assert code == 1
    assert "sentences [0]" in capsys.readouterr().err


def test_align_words_deterministic(german_setup):
    args = [
        "--quiet", "align-words",
        "--src-tokens", german_setup / "en.tok", "--tgt-tokens", german_setup / "de.tok",
        "--src-emb", german_setup / "en.cemb", "--tgt-emb", german_setup / "de.cemb",
        "--mode", "intersect", "--with-scores",
    ]
    out1, out2 = german_setup / "o1", german_setup / "o2"
    assert run(*args, "--output", out1) == 0
    assert run(*args, "--output", out2) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_align_concepts_and_train_em(tmp_path):
    (tmp_path / "in.amr").write_text(FIG_BLOCK, encoding="utf-8")
    out = tmp_path / "out.amr"
    assert run("--quiet", "align-concepts", "--treebank", tmp_path / "in.amr",
               "--output", out, "--method", "rule") == 0
    entries = read_treebank(out)
    assert entries[0].alignment.entries == {"b": (1, 1), "w": (2, 2), "g": (4, 4)}

    table = tmp_path / "t.tsv"
    assert run("--quiet", "train-em", "--treebank", tmp_path / "in.amr",
               "--output", table, "--iterations", 3) == 0
    assert table.read_text(encoding="utf-8").count("\n") > 3

    out2 = tmp_path / "out2.amr"
    assert run("--quiet", "align-concepts", "--treebank", tmp_path / "in.amr",
               "--output", out2, "--method", "ba", "--table", table) == 0
    entries = read_treebank(out2)
    assert set(entries[0].alignment.entries) >= {"b", "w", "g"}


def test_project_figure_pipeline(tmp_path):
    (tmp_path / "en.amr").write_text(FIG_BLOCK, encoding="utf-8")
    write_token_file([["Der", "Junge", "will", "gehen"]], tmp_path / "de.tok")
    (tmp_path / "fe.align").write_text("0-0 1-1 2-2 3-2 4-3\n", encoding="utf-8")
    out = tmp_path / "de.amr"
    report = tmp_path / "report.tsv"
    assert run(
        "--quiet", "project", "--treebank", tmp_path / "en.amr",
        "--foreign-tokens", tmp_path / "de.tok", "--align-fe", tmp_path / "fe.align",
        "--strategy", "ap", "--lang", "de", "--output", out, "--report", report,
    ) == 0
    entries = read_treebank(out)
    assert entries[0].tokens == ["Der", "Junge", "will", "gehen"]
    assert entries[0].language == "de"
    assert entries[0].alignment.entries == {"b": (1, 1), "w": (2, 2), "g": (3, 3)}
    # original English graph is preserved
    assert entries[0].graph.instances == {"w": "want-01", "b": "boy", "g": "go-02"}
    assert "fig1\tap\t1.0000" in report.read_text(encoding="utf-8")


def test_project_empty_treebank(tmp_path):
    (tmp_path / "en.amr").write_text("", encoding="utf-8")
    write_token_file([], tmp_path / "f.tok")
    out = tmp_path / "out.amr"
    assert run("--quiet", "project", "--treebank", tmp_path / "en.amr",
               "--foreign-tokens", tmp_path / "f.tok", "--strategy", "ap",
               "--output", out) == 0
    assert out.read_text(encoding="utf-8") == ""


def test_project_strategy_ba(tmp_path):
    (tmp_path / "en.amr").write_text(FIG_BLOCK, encoding="utf-8")
    write_token_file([["boy", "wants", "go"]], tmp_path / "f.tok")
    out = tmp_path / "out.amr"
    assert run("--quiet", "project", "--treebank", tmp_path / "en.amr",
               "--foreign-tokens", tmp_path / "f.tok", "--strategy", "ba",
               "--output", out) == 0
    entries = read_treebank(out)
    assert entries[0].alignment.entries["b"] == (0, 0)


def test_project_strategy_intersect_ea(german_setup):
    block = (
        "# ::id g1\n"
        "# ::tok Establishing models in industrial Innovation\n"
        "(e / establish-01\n"
        "    :ARG1 (m / model)\n"
        "    :topic (i / innovate-01\n"
        "        :mod (i2 / industry)))\n"
    )
    (german_setup / "en.amr").write_text(block, encoding="utf-8")
    out = german_setup / "de.amr"
    assert run(
        "--quiet", "project", "--treebank", german_setup / "en.amr",
        "--foreign-tokens", german_setup / "de.tok",
        "--src-emb", german_setup / "en.cemb", "--tgt-emb", german_setup / "de.cemb",
        "--strategy", "intersect-ea", "--output", out,
    ) == 0
    entries = read_treebank(out)
    assert entries[0].alignment is not None
    report = (german_setup / "de.amr.report.tsv").read_text(encoding="utf-8")
    assert report.splitlines()[0].startswith("# id")


def test_project_count_mismatch(tmp_path, capsys):
    (tmp_path / "en.amr").write_text(FIG_BLOCK, encoding="utf-8")
    write_token_file([["a"], ["b"]], tmp_path / "f.tok")
    code = run("--quiet", "project", "--treebank", tmp_path / "en.amr",
               "--foreign-tokens", tmp_path / "f.tok", "--strategy", "ba",
               "--output", tmp_path / "o.amr")
    assert code == 1
    assert "foreign sentences" in capsys.readouterr().err


def test_score_self_is_one(tmp_path, capsys):
    (tmp_path / "a.amr").write_text(FIG_BLOCK, encoding="utf-8")
    assert run("--quiet", "score", "--candidate", tmp_path / "a.amr",
               "--reference", tmp_path / "a.amr") == 0
    out = capsys.readouterr().out
    assert "# corpus\t1.0000\t1.0000\t1.0000" in out


def test_score_partial_pair(tmp_path, capsys):
    (tmp_path / "c.amr").write_text(WANT_BOY_BLOCK, encoding="utf-8")
    (tmp_path / "r.amr").write_text(WANT_DOG_BLOCK, encoding="utf-8")
    assert run("--quiet", "score", "--candidate", tmp_path / "c.amr",
               "--reference", tmp_path / "r.amr", "--macro") == 0
    out = capsys.readouterr().out
    assert "p1\t0.7500\t0.7500\t0.7500" in out
    assert "# corpus\t0.7500\t0.7500\t0.7500" in out
    assert "# macro\t0.7500\t0.7500\t0.7500" in out


def test_score_empty_is_error(tmp_path, capsys):
    (tmp_path / "e.amr").write_text("", encoding="utf-8")
    code = run("--quiet", "score", "--candidate", tmp_path / "e.amr",
               "--reference", tmp_path / "e.amr")
    assert code == 1
    assert "no pairs" in capsys.readouterr().err


def test_score_id_mismatch(tmp_path, capsys):
    (tmp_path / "c.amr").write_text(WANT_BOY_BLOCK.replace("p1", "c9"), encoding="utf-8")
    (tmp_path / "r.amr").write_text(WANT_DOG_BLOCK, encoding="utf-8")
    code = run("--quiet", "score", "--candidate", tmp_path / "c.amr",
               "--reference", tmp_path / "r.amr")
    assert code == 1
    assert "id mismatch" in capsys.readouterr().err


def test_merge_command(tmp_path):
    (tmp_path / "de.amr").write_text("# ::id s1\n# ::tok ein\n(a / alpha)\n", encoding="utf-8")
    (tmp_path / "es.amr").write_text("# ::id s2\n# ::tok uno\n(b / beta)\n", encoding="utf-8")
    out = tmp_path / "multi.amr"
    assert run("--quiet", "merge", f"de={tmp_path / 'de.amr'}", f"es={tmp_path / 'es.amr'}",
               "--output", out) == 0
    entries = read_treebank(out)
    assert [e.language for e in entries] == ["de", "es"]

    assert run("--quiet", "merge", f"fr={tmp_path / 'de.amr'}", "--output", out) == 0
    assert read_treebank(out)[0].language == "fr"


def test_merge_requires_inputs(capsys):
    with pytest.raises(SystemExit):
        run("--quiet", "merge", "--output", "x.amr")


def test_merge_rejects_bad_spec(tmp_path, capsys):
    code = run("--quiet", "merge", "noequals", "--output", tmp_path / "o.amr")
    assert code == 1
    assert "LANG=PATH" in capsys.readouterr().err


def test_coverage_command(tmp_path, capsys):
    block = "# ::id s1\n# ::tok boy\n# ::alignments 0-0|b\n(w / want-01\n    :ARG0 (b / boy))\n"
    (tmp_path / "t.amr").write_text(block, encoding="utf-8")
    assert run("--quiet", "coverage", "--treebank", tmp_path / "t.amr") == 0
    out = capsys.readouterr().out
    assert "s1\t0.5000" in out
    assert "# corpus\t0.5000" in out


def test_jobs_flag_matches_serial(german_setup):
    args = [
        "align-words",
        "--src-tokens", german_setup / "en.tok", "--tgt-tokens", german_setup / "de.tok",
        "--src-emb", german_setup / "en.cemb", "--tgt-emb", german_setup / "de.cemb",
        "--mode", "intersect",
    ]
    o1, o2 = german_setup / "j1", german_setup / "j2"
    assert run("--quiet", *args, "--output", o1) == 0
    assert run("--quiet", "--jobs", "4", *args, "--output", o2) == 0
    assert o1.read_bytes() == o2.read_bytes()
