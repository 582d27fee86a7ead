#!/usr/bin/env python3
"""Regenerates the test fixtures in this directory.

Outputs (all deterministic):
  kb50.tsv                 50-row API documentation table
  micro32.jsonl            32 raw methods for the overfit run
  fixture_corpus.jsonl     raw corpus with known filter outcomes
  fixture_expected.json    expected filter counts for fixture_corpus.jsonl
  methods100.jsonl         100 methods for the parser checks
  direction_kb.tsv         documentation table for the direction corpus
  direction500.jsonl       500 single-API methods, comment = doc first sentence
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

KB = [
    ("isSynthetic", 0, "java.lang.reflect.Executable",
     "Returns true if this executable is a synthetic construct; returns false otherwise."),
    ("flush", 0, "java.io.OutputStream", "Flushes the stream."),
    ("flush", 0, "java.io.Writer", "Flushes the stream."),
    ("flush", 0, "java.io.PrintStream", "Flushes the stream."),
    ("flush", 0, "java.io.BufferedOutputStream", "Flushes this buffered output stream."),
    ("toString", 0, "java.lang.Object", "Returns a string representation of the object."),
    ("toString", 0, "java.lang.Enum", "Returns a string representation of the object."),
    ("toString", 0, "java.lang.Integer", "Returns a String object representing this Integer's value."),
    ("indexOf", 1, "java.lang.String",
     "Returns the index within this string of the first occurrence of the specified character."),
    ("indexOf", 2, "java.lang.String",
     "Returns the index within this string of the first occurrence of the specified character, "
     "starting the search at the specified index."),
    ("charAt", 1, "java.lang.String", "Returns the char value at the specified index."),
    ("length", 0, "java.lang.String", "Returns the length of this string."),
    ("substring", 1, "java.lang.String", "Returns a string that is a substring of this string."),
    ("substring", 2, "java.lang.String", "Returns a string that is a substring of this string."),
    ("trim", 0, "java.lang.String",
     "Returns a string whose value is this string, with all leading and trailing space removed."),
    ("toLowerCase", 0, "java.lang.String",
     "Converts all of the characters in this String to lower case using the rules of the default locale."),
    ("toUpperCase", 0, "java.lang.String",
     "Converts all of the characters in this String to upper case using the rules of the default locale."),
    ("startsWith", 1, "java.lang.String", "Tests if this string starts with the specified prefix."),
    ("endsWith", 1, "java.lang.String", "Tests if this string ends with the specified suffix."),
    ("split", 1, "java.lang.String", "Splits this string around matches of the given regular expression."),
    ("replace", 2, "java.lang.String",
     "Replaces each substring of this string that matches the literal target sequence with the "
     "specified literal replacement sequence."),
    ("contains", 1, "java.lang.String",
     "Returns true if and only if this string contains the specified sequence of char values."),
    ("equals", 1, "java.lang.Object", "Indicates whether some other object is equal to this one."),
    ("hashCode", 0, "java.lang.Object", "Returns a hash code value for the object."),
    ("append", 1, "java.lang.StringBuilder", "Appends the string representation of the argument to the sequence."),
    ("put", 2, "java.util.Map", "Associates the specified value with the specified key in this map."),
    ("get", 1, "java.util.Map",
     "Returns the value to which the specified key is mapped, or null if this map contains no mapping for the key."),
    ("containsKey", 1, "java.util.Map", "Returns true if this map contains a mapping for the specified key."),
    ("add", 1, "java.util.List", "Appends the specified element to the end of this list."),
    ("size", 0, "java.util.Collection", "Returns the number of elements in this collection."),
    ("isEmpty", 0, "java.util.Collection", "Returns true if this collection contains no elements."),
    ("remove", 1, "java.util.List", "Removes the first occurrence of the specified element from this list, if it is present."),
    ("clear", 0, "java.util.Collection", "Removes all of the elements from this collection."),
    ("iterator", 0, "java.lang.Iterable", "Returns an iterator over elements of type T."),
    ("hasNext", 0, "java.util.Iterator", "Returns true if the iteration has more elements."),
    ("next", 0, "java.util.Iterator", "Returns the next element in the iteration."),
    ("close", 0, "java.io.Closeable", "Closes this stream and releases any system resources associated with it."),
    ("read", 0, "java.io.InputStream", "Reads the next byte of data from the input stream."),
    ("write", 1, "java.io.OutputStream", "Writes the specified byte to this output stream."),
    ("readLine", 0, "java.io.BufferedReader", "Reads a line of text."),
    ("println", 1, "java.io.PrintStream", "Prints a String and then terminates the line."),
    ("parseInt", 1, "java.lang.Integer", "Parses the string argument as a signed decimal integer."),
    ("valueOf", 1, "java.lang.String", "Returns the string representation of the Object argument."),
    ("max", 2, "java.lang.Math", "Returns the greater of two int values."),
    ("min", 2, "java.lang.Math", "Returns the smaller of two int values."),
    ("abs", 1, "java.lang.Math", "Returns the absolute value of an int value."),
    ("currentTimeMillis", 0, "java.lang.System", "Returns the current time in milliseconds."),
    ("getName", 0, "java.io.File", "Returns the name of the file or directory denoted by this abstract pathname."),
    ("exists", 0, "java.io.File", "Tests whether the file or directory denoted by this abstract pathname exists."),
    ("delete", 0, "java.io.File", "Deletes the file or directory denoted by this abstract pathname."),
]
assert len(KB) == 50

# Call snippets: (statement using `v`, calls it makes as (name, arity)).
API_STMTS = [
    ("int i = text.indexOf(c);", [("indexOf", 1)]),
    ("char ch = text.charAt(pos);", [("charAt", 1)]),
    ("int n = text.length();", [("length", 0)]),
    ("String head = text.substring(0, pos);", [("substring", 2)]),
    ("String tail = text.substring(pos);", [("substring", 1)]),
    ("String clean = text.trim();", [("trim", 0)]),
    ("String low = text.toLowerCase();", [("toLowerCase", 0)]),
    ("String up = text.toUpperCase();", [("toUpperCase", 0)]),
    ("boolean pre = text.startsWith(prefix);", [("startsWith", 1)]),
    ("boolean suf = text.endsWith(suffix);", [("endsWith", 1)]),
    ("String[] parts = text.split(sep);", [("split", 1)]),
    ("String fixed = text.replace(from, to);", [("replace", 2)]),
    ("boolean has = text.contains(part);", [("contains", 1)]),
    ("builder.append(text);", [("append", 1)]),
    ("cache.put(key, value);", [("put", 2)]),
    ("Object found = cache.get(key);", [("get", 1)]),
    ("boolean known = cache.containsKey(key);", [("containsKey", 1)]),
    ("items.add(value);", [("add", 1)]),
    ("int count = items.size();", [("size", 0)]),
    ("boolean none = items.isEmpty();", [("isEmpty", 0)]),
    ("items.remove(value);", [("remove", 1)]),
    ("items.clear();", [("clear", 0)]),
    ("out.flush();", [("flush", 0)]),
    ("out.write(b);", [("write", 1)]),
    ("int b = in.read();", [("read", 0)]),
    ("String line = reader.readLine();", [("readLine", 0)]),
    ("System.out.println(text);", [("println", 1)]),
    ("int parsed = Integer.parseInt(text);", [("parseInt", 1)]),
    ("long now = System.currentTimeMillis();", [("currentTimeMillis", 0)]),
    ("String name = file.getName();", [("getName", 0)]),
    ("boolean there = file.exists();", [("exists", 0)]),
    ("int big = Math.max(a, b);", [("max", 2)]),
    ("int small = Math.min(a, b);", [("min", 2)]),
    ("int mag = Math.abs(delta);", [("abs", 1)]),
    ("boolean synth = member.isSynthetic();", [("isSynthetic", 0)]),
]

# Statements with calls that the KB does not document.
PLAIN_STMTS = [
    "log(text);",
    "int total = a + b;",
    "validate(value, limit);",
    "counter++;",
    "helper.prepare();",
    "String label = \"x(y)\";",
    "if (value == null) {\n        return;\n    }",
    "for (int k = 0; k < limit; k++) {\n        total += k;\n    }",
]

VERBS = ["returns", "computes", "checks", "builds", "reads", "writes", "counts", "finds", "updates", "removes",
         "loads", "stores"]
OBJECTS = ["the user name", "the file size", "the first index", "the cached value", "the line count",
           "the trimmed text", "the session key", "the next token", "the output buffer", "the parsed number",
           "the current time", "the matching entry", "the item list", "the header row", "the config path",
           "the error message"]
QUALIFIERS = ["for the given input", "from the stream", "in the map", "of this reader", "when it exists",
              "using the cache", "if needed", "for each item"]


def camel(words):
    words = [w for w in words if w not in ("the", "a", "of", "for", "in", "if", "when", "from", "using", "each",
                                           "this", "it", "given")]
    return words[0] + "".join(w.capitalize() for w in words[1:])


def method_source(name, stmts, ret="void", params="String text, int pos"):
    body = "\n".join("    " + s for s in stmts)
    tail = "\n    return null;" if ret != "void" else ""
    return f"public {ret} {name}({params}) {{\n{body}{tail}\n}}"


def count_resolvable(calls):
    keys = {(n, a) for n, a, _, _ in KB}
    out, last = 0, None
    for c in calls:
        if c not in keys:
            continue
        if c == last:
            continue
        last = c
        out += 1
    return out


def make_micro(rng):
    rows = []
    used = set()
    for i in range(32):
        while True:
            verb = VERBS[i % len(VERBS)]
            obj = rng.choice(OBJECTS)
            qual = rng.choice(QUALIFIERS)
            comment = f"{verb} {obj} {qual}"
            if comment not in used:
                used.add(comment)
                break
        k = 1 + i % 3
        stmts = [s for s, _ in rng.sample(API_STMTS, k)] + [rng.choice(PLAIN_STMTS)]
        name = camel(f"{verb} {obj}".split()) + str(i)
        src = method_source(name, stmts, ret="Object")
        doc = comment[0].upper() + comment[1:] + ". More details follow here."
        rows.append({"id": f"micro{i:02d}", "code": src, "docstring": doc})
    return rows


def make_valid(rng, idx, n_api):
    stmts_calls = rng.sample(API_STMTS, n_api) if n_api else []
    plain = rng.sample(PLAIN_STMTS, 2)
    stmts = [s for s, _ in stmts_calls] + plain
    rng.shuffle(stmts)
    verb = rng.choice(VERBS)
    obj = rng.choice(OBJECTS)
    qual = rng.choice(QUALIFIERS)
    comment = f"{verb.capitalize()} {obj} {qual}."
    name = camel(f"{verb} {obj}".split()) + f"V{idx}"
    src = method_source(name, stmts, ret=rng.choice(["void", "Object", "String"]))
    calls = [c for _, cs in stmts_calls for c in cs]
    return {"id": f"m{idx:03d}", "code": src, "docstring": comment}, calls


def make_fixture_corpus(rng):
    lines = []
    expected = {"malformed": 0, "dropped": {}, "kept_ids": [], "duplicate_of": {}}

    def drop(reason):
        expected["dropped"][reason] = expected["dropped"].get(reason, 0) + 1

    valid = []
    api_plan = [0] * 8 + [1] * 12 + [2] * 10 + [3] * 10 + [4] * 6 + [5] * 4
    for i, n_api in enumerate(api_plan):
        rec, calls = make_valid(rng, i, n_api)
        assert count_resolvable(calls) == n_api
        valid.append(rec)

    for rec in valid:
        lines.append(json.dumps(rec))
        # The name rule is a plain substring test, so "writesTrimmed" counts.
        header_name = rec["code"].split("(")[0].split()[-1]
        if "test" in header_name.lower():
            drop("test_name")
        else:
            expected["kept_ids"].append(rec["id"])

    lines.insert(5, "{not json at all")
    expected["malformed"] += 1
    lines.insert(17, json.dumps({"id": "nodoc", "code": "void f() {\n  g();\n  h();\n}"}))
    expected["malformed"] += 1

    extra = [
        ({"id": "short1", "code": "public int size() {\n    int n = items.size();\n    return n;\n}",
          "docstring": "Gets it."}, "comment_too_short"),
        ({"id": "short2", "code": "public void reset() {\n    items.clear();\n    count = 0;\n}",
          "docstring": "Reset"}, "comment_too_short"),
        ({"id": "lines1", "code": "public int one() { return 1; }",
          "docstring": "Returns the constant one."}, "too_few_lines"),
        ({"id": "lines2", "code": "public String name() {\n    return name; }",
          "docstring": "Returns the stored name."}, "too_few_lines"),
        ({"id": "test1", "code": "public void testParser() {\n    Parser p = build();\n    check(p);\n}",
          "docstring": "Checks that the parser builds."}, "test_name"),
        ({"id": "test2", "code": "void parserTestHelper(int n) {\n    int k = n;\n    run(k);\n}",
          "docstring": "Runs the parser helper routine."}, "test_name"),
        ({"id": "ctor1", "code": "public Widget(int size) {\n    this.size = size;\n    init();\n}",
          "docstring": "Creates a widget of the given size."}, "constructor"),
        ({"id": "ctor2", "code": "Widget() {\n    this(10);\n    log(\"made\");\n}",
          "docstring": "Creates a default widget instance."}, "constructor"),
        ({"id": "long1", "code": "public void bulk() {\n" +
          "\n".join(f"    long valueNumber{k} = computeSomethingLarge(k);" for k in range(60)) + "\n}",
          "docstring": "Computes many values in bulk."}, "code_too_long"),
        ({"id": "longdoc", "code": "public void note(String text) {\n    log(text);\n    flushAll();\n}",
          "docstring": " ".join(["word"] * 70) + "."}, "comment_too_long"),
        ({"id": "broken", "code": "public void broken() {\n    if (ready) {\n        go();\n    \n",
          "docstring": "Starts the engine when ready."}, "unparsable"),
    ]
    for rec, reason in extra:
        lines.append(json.dumps(rec))
        drop(reason)

    # Duplicates of earlier kept methods: whitespace differs, comment differs.
    for k, src_idx in enumerate([3, 10, 21]):
        orig = valid[src_idx]
        dup = {"id": f"dup{k}", "code": orig["code"].replace("\n    ", "\n\t  "),
               "docstring": "A different comment for the same body."}
        lines.append(json.dumps(dup))
        drop("duplicate")
        expected["duplicate_of"][dup["id"]] = orig["id"]

    expected["read"] = len(lines)
    expected["kept"] = len(expected["kept_ids"])
    expected["api_counts"] = {rec["id"]: n for rec, n in zip(valid, api_plan) if rec["id"] in expected["kept_ids"]}
    return lines, expected


TRICKY = [
    """@Override
public <T extends Comparable<T>> List<T> sortedCopy(List<T> input) {
    List<T> out = new ArrayList<>(input);
    Collections.sort(out);
    return out;
}""",
    """public void runAll(List<Runnable> tasks) {
    tasks.forEach(t -> t.run());
    tasks.stream().map(x -> x.toString()).forEach(System.out::println);
}""",
    """public int parse(String s) {
    try {
        return Integer.parseInt(s.trim());
    } catch (NumberFormatException e) {
        log.warn("bad number: " + s, e);
        return -1;
    } finally {
        counter.incrementAndGet();
    }
}""",
    """public String describe(int code) {
    switch (code) {
        case 1: return name.toUpperCase();
        case 2: return String.valueOf(code);
        default: return "unknown(" + code + ")";
    }
}""",
    """public static void main(String[] args) throws Exception {
    // parse args(), not a call
    /* block comment with call(x) */
    String q = "text with call(y) inside";
    char c = '(';
    System.out.println(q + c);
}""",
    """public Runnable task(final Object lock) {
    return new Runnable() {
        @Override
        public void run() {
            synchronized (lock) {
                lock.notifyAll();
            }
        }
    };
}""",
    """private int[] copy(int[] src) {
    int[] dst = new int[src.length];
    System.arraycopy(src, 0, dst, 0, src.length);
    return dst;
}""",
    """public boolean matches(Object o) {
    if (!(o instanceof Pattern)) {
        return false;
    }
    Pattern p = (Pattern) o;
    return p.pattern().equals(regex) && p.flags() == flags;
}""",
    """public void loop(Map<String, List<Integer>> m) {
    for (Map.Entry<String, List<Integer>> e : m.entrySet()) {
        for (int v : e.getValue()) {
            total += Math.abs(v);
        }
    }
    do {
        total = total / 2;
    } while (total > limit(total));
}""",
    """public String chain(StringBuilder sb) {
    return sb.append("a").append(f(g(1), h(2, 3))).reverse().toString();
}""",
    """public void resources(Path path) throws IOException {
    try (BufferedReader r = Files.newBufferedReader(path);
         Writer w = new FileWriter("out.txt")) {
        String line;
        while ((line = r.readLine()) != null) {
            w.write(line);
        }
    }
}""",
    """public int ternary(int a, int b) {
    int m = a > b ? compute(a) : compute(b);
    assert m >= 0 : "negative " + describe(m);
    return m << 2 | (m >>> 1);
}""",
    """public Object[] arrays() {
    Object[] xs = new Object[] { make(1), make(2) };
    int[][] grid = new int[3][4];
    grid[0][1] = xs.length;
    return xs;
}""",
    """@SuppressWarnings("unchecked")
public final synchronized <K, V> Map<K, V> cast(Object raw) {
    Map<K, V> m = (Map<K, V>) raw;
    this.last = m;
    super.touch(m.size());
    return m;
}""",
    """public String block() {
    String s = \"\"\"
        text block (with parens) and "quotes"
        \"\"\";
    return s.strip();
}""",
    """public int labeled(int[][] g) {
    int found = 0;
    outer:
    for (int i = 0; i < g.length; i++) {
        for (int j = 0; j < g[i].length; j++) {
            if (g[i][j] < 0) {
                break outer;
            }
            found += weight(i, j);
        }
    }
    return found;
}""",
    """public void generic() {
    List<Map<String, Integer>> xs = new ArrayList<Map<String, Integer>>();
    xs.add(new HashMap<>());
    Optional.ofNullable(xs.get(0)).ifPresent(m -> m.put("k", 1));
}""",
    """public double math(double x) {
    double y = Math.sqrt(x * x + 1.0e-3) - Math.pow(x, 2.5d);
    y += -x + ~3 + (int) 'c';
    return y >= 0 ? y : -y;
}""",
    """public void varargs(String... names) {
    for (String n : names) {
        emit(n, names.length, n.hashCode());
    }
    throw new IllegalStateException(String.format("%d", names.length));
}""",
    """public Comparator<String> comparator() {
    return (a, b) -> {
        int c = Integer.compare(a.length(), b.length());
        return c != 0 ? c : a.compareTo(b);
    };
}""",
    """protected void events(Object source) {
    listeners.forEach(l -> l.onEvent(new Event(source, now())));
    java.util.Objects.requireNonNull(source, "source");
}""",
    """public int unicode() {
    String s = "caf\\u00e9 \\"quoted\\" (x)";
    char c = '\\'';
    return s.indexOf(c) + s.codePointAt(0);
}""",
    """public boolean flags(int a) {
    boolean x = a > 0 && a < 10 || check(a);
    x &= !done;
    x ^= ready();
    return x;
}""",
    """public void anonymousGeneric() {
    Comparator<Integer> c = new Comparator<Integer>() {
        public int compare(Integer a, Integer b) {
            return Integer.compare(a, b);
        }
    };
    list.sort(c);
}""",
    """default String fromInterface(Object o) {
    Supplier<String> s = () -> o.toString();
    Function<String, Integer> f = String::length;
    return s.get() + f.apply("abc");
}""",
]


def make_methods100(micro, fixture_lines):
    out = []
    for i, src in enumerate(TRICKY):
        out.append({"id": f"tricky{i:02d}", "code": src, "docstring": "Fixture method."})
    for r in micro:
        out.append({"id": r["id"], "code": r["code"], "docstring": r["docstring"]})
    for line in fixture_lines:
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            continue
        if rec.get("id", "").startswith("m") and "code" in rec:
            out.append({"id": rec["id"], "code": rec["code"], "docstring": rec["docstring"]})
        if len(out) == 100:
            break
    assert len(out) == 100, len(out)
    return out


DIR_VERBS = ["returns", "computes", "updates", "removes", "inserts", "validates", "encodes", "decodes",
             "merges", "splits"]
DIR_ADJ = ["cached", "pending", "sorted", "visible", "remote", "local", "stale", "active", "shared",
           "nested", "hidden", "partial"]
DIR_NOUN = ["record", "buffer", "index", "window", "segment", "token", "channel", "bucket", "frame",
            "cursor", "header", "payload", "socket", "ledger", "matrix"]
DIR_NOUN2 = ["registry", "queue", "session", "cluster", "table", "stream", "tree", "pool", "graph",
             "journal", "catalog", "archive", "module", "profile", "vault"]
DIR_TAIL = ["", "in place", "for the current thread", "using the default settings", "when available"]
SYL_C = "bdfgklmnprstvz"
SYL_V = "aeiou"


def syllable(rng):
    return rng.choice(SYL_C) + rng.choice(SYL_V) + rng.choice(SYL_C) + rng.choice(SYL_V)


def make_direction(rng):
    apis = []
    names = set()
    while len(apis) < 250:
        name = syllable(rng) + syllable(rng).capitalize() + syllable(rng).capitalize()
        if name in names:
            continue
        names.add(name)
        tail = rng.choice(DIR_TAIL)
        desc = (f"{rng.choice(DIR_VERBS).capitalize()} the {rng.choice(DIR_ADJ)} {rng.choice(DIR_NOUN)} "
                f"of the {rng.choice(DIR_NOUN2)}" + (f" {tail}" if tail else "") + ".")
        desc += " " + rng.choice(["This call is thread safe.", "Never returns null.", "See the module notes."])
        apis.append((name, desc))
    kb_rows = [f"{n}\t1\tcom.example.gen.Api{i % 17}\t{d}" for i, (n, d) in enumerate(apis)]
    uses = [a for a in apis for _ in range(2)]
    rng.shuffle(uses)
    mnames = ["process", "handle", "apply", "run", "execute", "perform", "doWork", "update", "compute", "visit"]
    suffix = ["Item", "Entry", "Value", "Data", "Node", "Element", "Object", "Part"]
    recvs = ["helper", "service", "engine", "ctx", "mgr", "api"]
    rows = []
    for i, (api, desc) in enumerate(uses):
        arg = rng.choice(["input", "value", "arg", "item", "obj"])
        extra = rng.choice(["", "    if (result == null) {\n        return " + arg + ";\n    }\n"])
        code = (f"public Object {rng.choice(mnames)}{rng.choice(suffix)}(Object {arg}) {{\n"
                f"    Object result = {rng.choice(recvs)}.{api}({arg});\n{extra}"
                f"    return result;\n}}")
        first = desc.split(". ")[0] + "."
        rows.append({"id": f"d{i:03d}", "code": code, "docstring": first})
    return kb_rows, rows


def main():
    rng = random.Random(20240611)
    (HERE / "kb50.tsv").write_text(
        "# name\tarity\tclass_path\tdescription\n" + "".join(f"{n}\t{a}\t{c}\t{d}\n" for n, a, c, d in KB))
    micro = make_micro(rng)
    (HERE / "micro32.jsonl").write_text("".join(json.dumps(r) + "\n" for r in micro))
    lines, expected = make_fixture_corpus(rng)
    (HERE / "fixture_corpus.jsonl").write_text("".join(l + "\n" for l in lines))
    (HERE / "fixture_expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    m100 = make_methods100(micro, lines)
    (HERE / "methods100.jsonl").write_text("".join(json.dumps(r) + "\n" for r in m100))
    kb_rows, drows = make_direction(rng)
    (HERE / "direction_kb.tsv").write_text("".join(r + "\n" for r in kb_rows))
    (HERE / "direction500.jsonl").write_text("".join(json.dumps(r) + "\n" for r in drows))


if __name__ == "__main__":
    main()
