#include "fairtt/cbctt.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fairtt {

namespace {

constexpr int kMaxPeriods = 64;  // period sets are uint64 bitmasks
constexpr int kMaxRooms = 64;    // room sets likewise

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

long long to_number(const std::string& tok, int line, const char* what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, std::string("expected a number for ") + what + ", got '" + tok + "'");
    }
    return value;
}

bool is_section_header(const std::vector<std::string>& tokens) {
    if (tokens.size() != 1) return false;
    const std::string& t = tokens[0];
    if (t.size() < 2 || t.back() != ':') return false;
    return std::all_of(t.begin(), t.end() - 1,
                       [](unsigned char c) { return std::isupper(c) || c == '_'; });
}

}  // namespace

int Instance::course_index(const std::string& id) const {
    for (std::size_t i = 0; i < courses.size(); ++i) {
        if (courses[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

void Instance::finalize(const std::vector<std::pair<int, int>>& unavailability) {
    const std::size_t nc = courses.size();
    lecture_begin_.assign(nc + 1, 0);
    for (std::size_t c = 0; c < nc; ++c) lecture_begin_[c + 1] = lecture_begin_[c] + courses[c].lectures;
    total_lectures_ = lecture_begin_[nc];
    lecture_course_.assign(total_lectures_, 0);
    for (std::size_t c = 0; c < nc; ++c) {
        for (int l = lecture_begin_[c]; l < lecture_begin_[c + 1]; ++l) lecture_course_[l] = static_cast<int>(c);
    }

    unavailable_.assign(nc, 0);
    for (auto [course, period] : unavailability) unavailable_[course] |= std::uint64_t{1} << period;

    conflict_.assign(nc * nc, 0);
    for (const auto& cur : curricula) {
        for (std::size_t a = 0; a < cur.courses.size(); ++a) {
            for (std::size_t b = a + 1; b < cur.courses.size(); ++b) {
                conflict_[static_cast<std::size_t>(cur.courses[a]) * nc + cur.courses[b]] = 1;
                conflict_[static_cast<std::size_t>(cur.courses[b]) * nc + cur.courses[a]] = 1;
            }
        }
    }
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = a + 1; b < nc; ++b) {
            if (courses[a].teacher == courses[b].teacher) {
                conflict_[a * nc + b] = 1;
                conflict_[b * nc + a] = 1;
            }
        }
    }
    conflict_degree_.assign(nc, 0);
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = 0; b < nc; ++b) conflict_degree_[a] += conflict_[a * nc + b];
    }
}

Instance parse_instance(std::istream& in, std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }

    std::size_t pos = 0;
    auto next_tokens = [&](std::vector<std::string>& out, int& line_no) -> bool {
        while (pos < lines.size()) {
            out = tokenize(lines[pos]);
            line_no = static_cast<int>(pos) + 1;
            ++pos;
            if (!out.empty()) return true;
        }
        return false;
    };

    Instance inst;
    long long declared_courses = -1, declared_rooms = -1, declared_curricula = -1, declared_unavail = -1;
    bool extended_fields_noted = false;

    // Header: "Key: value..." lines until the first all-caps section.
    std::vector<std::string> tokens;
    int line_no = 0;
    while (true) {
        if (!next_tokens(tokens, line_no)) throw ParseError(line_no, "unexpected end of file in header");
        if (is_section_header(tokens)) break;
        if (tokens[0].back() != ':') throw ParseError(line_no, "malformed header line '" + tokens[0] + "'");
        const std::string key = tokens[0].substr(0, tokens[0].size() - 1);
        auto value = [&](const char* what) -> long long {
            if (tokens.size() < 2) throw ParseError(line_no, std::string("missing value for ") + what);
            return to_number(tokens[1], line_no, what);
        };
        if (key == "Name") {
            if (tokens.size() < 2) throw ParseError(line_no, "missing instance name");
            inst.name = tokens[1];
        } else if (key == "Courses") {
            declared_courses = value("Courses");
        } else if (key == "Rooms") {
            declared_rooms = value("Rooms");
        } else if (key == "Days") {
            inst.days = static_cast<int>(value("Days"));
        } else if (key == "Periods_per_day") {
            inst.periods_per_day = static_cast<int>(value("Periods_per_day"));
        } else if (key == "Curricula") {
            declared_curricula = value("Curricula");
        } else if (key == "Constraints" || key == "UnavailabilityConstraints") {
            declared_unavail = value(key.c_str());
        } else if (key == "Min_Max_Daily_Lectures" || key == "RoomConstraints") {
            warn("header '" + key + "' is extended-format only; ignored");
        } else {
            warn("unknown header '" + key + "' ignored");
        }
    }

    if (declared_courses < 0) throw ParseError(line_no, "header is missing 'Courses:'");
    if (declared_rooms < 0) throw ParseError(line_no, "header is missing 'Rooms:'");
    if (declared_curricula < 0) throw ParseError(line_no, "header is missing 'Curricula:'");
    if (inst.days <= 0 || inst.periods_per_day <= 0) {
        throw ParseError(line_no, "header must declare positive Days and Periods_per_day");
    }
    if (inst.periods() > kMaxPeriods) {
        throw ParseError(line_no, "more than 64 periods are not supported");
    }
    if (declared_rooms > kMaxRooms) throw ParseError(line_no, "more than 64 rooms are not supported");

    std::unordered_map<std::string, int> course_by_id, room_by_id, teacher_by_id;
    std::unordered_set<std::string> curriculum_ids;
    std::vector<std::pair<int, int>> unavailability;
    bool saw_end = false;

    auto read_counted = [&](long long count, const char* what, auto&& handle) {
        for (long long k = 0; k < count; ++k) {
            if (!next_tokens(tokens, line_no)) {
                throw ParseError(line_no, std::string("unexpected end of file: expected ") +
                                              std::to_string(count) + " " + what + " entries");
            }
            if (is_section_header(tokens)) {
                throw ParseError(line_no, std::string("count mismatch: expected ") + std::to_string(count) +
                                              " " + what + " entries, found " + std::to_string(k));
            }
            handle();
        }
    };

    // `tokens` currently holds the first section header.
    while (true) {
        const std::string section = tokens[0];
        if (section == "COURSES:") {
            read_counted(declared_courses, "course", [&] {
                if (tokens.size() < 5) throw ParseError(line_no, "course line needs id, teacher, lectures, min days, students");
                Course c;
                c.id = tokens[0];
                const std::string teacher_id = tokens[1];
                auto [it, inserted] = teacher_by_id.try_emplace(teacher_id, static_cast<int>(inst.teachers.size()));
                if (inserted) inst.teachers.push_back(teacher_id);
                c.teacher = it->second;
                c.lectures = static_cast<int>(to_number(tokens[2], line_no, "lecture count"));
                c.min_working_days = static_cast<int>(to_number(tokens[3], line_no, "min working days"));
                c.students = static_cast<int>(to_number(tokens[4], line_no, "student count"));
                if (c.lectures < 0 || c.min_working_days < 0 || c.students < 0) {
                    throw ParseError(line_no, "negative course attribute");
                }
                if (tokens.size() > 5 && !extended_fields_noted) {
                    warn("extra per-line fields (extended format) ignored");
                    extended_fields_noted = true;
                }
                if (!course_by_id.emplace(c.id, static_cast<int>(inst.courses.size())).second) {
                    throw ParseError(line_no, "duplicate course id '" + c.id + "'");
                }
                inst.courses.push_back(std::move(c));
            });
        } else if (section == "ROOMS:") {
            read_counted(declared_rooms, "room", [&] {
                if (tokens.size() < 2) throw ParseError(line_no, "room line needs id and capacity");
                Room r;
                r.id = tokens[0];
                r.capacity = static_cast<int>(to_number(tokens[1], line_no, "room capacity"));
                if (r.capacity < 0) throw ParseError(line_no, "negative room capacity");
                if (!room_by_id.emplace(r.id, static_cast<int>(inst.rooms.size())).second) {
                    throw ParseError(line_no, "duplicate room id '" + r.id + "'");
                }
                inst.rooms.push_back(std::move(r));
            });
        } else if (section == "CURRICULA:") {
            read_counted(declared_curricula, "curriculum", [&] {
                if (tokens.size() < 2) throw ParseError(line_no, "curriculum line needs id and member count");
                Curriculum cur;
                cur.id = tokens[0];
                const long long members = to_number(tokens[1], line_no, "curriculum member count");
                if (members < 0) throw ParseError(line_no, "negative curriculum member count");
                if (static_cast<long long>(tokens.size()) - 2 != members) {
                    throw ParseError(line_no, "curriculum '" + cur.id + "' declares " + std::to_string(members) +
                                                  " members but lists " + std::to_string(tokens.size() - 2));
                }
                for (std::size_t k = 2; k < tokens.size(); ++k) {
                    auto it = course_by_id.find(tokens[k]);
                    if (it == course_by_id.end()) {
                        throw ParseError(line_no, "curriculum '" + cur.id + "' references unknown course '" +
                                                      tokens[k] + "'");
                    }
                    if (std::find(cur.courses.begin(), cur.courses.end(), it->second) != cur.courses.end()) {
                        throw ParseError(line_no, "curriculum '" + cur.id + "' lists course '" + tokens[k] +
                                                      "' twice");
                    }
                    cur.courses.push_back(it->second);
                }
                if (!curriculum_ids.insert(cur.id).second) {
                    throw ParseError(line_no, "duplicate curriculum id '" + cur.id + "'");
                }
                for (int course : cur.courses) {
                    inst.courses[course].curricula.push_back(static_cast<int>(inst.curricula.size()));
                }
                inst.curricula.push_back(std::move(cur));
            });
        } else if (section == "UNAVAILABILITY_CONSTRAINTS:") {
            const long long count = declared_unavail < 0 ? 0 : declared_unavail;
            if (declared_unavail < 0) warn("no Constraints count declared; reading none");
            read_counted(count, "unavailability", [&] {
                if (tokens.size() < 3) throw ParseError(line_no, "unavailability line needs course, day, period");
                auto it = course_by_id.find(tokens[0]);
                if (it == course_by_id.end()) {
                    throw ParseError(line_no, "unavailability references unknown course '" + tokens[0] + "'");
                }
                const long long day = to_number(tokens[1], line_no, "day");
                const long long slot = to_number(tokens[2], line_no, "period");
                if (day < 0 || day >= inst.days) throw ParseError(line_no, "day out of range");
                if (slot < 0 || slot >= inst.periods_per_day) throw ParseError(line_no, "period out of range");
                unavailability.emplace_back(it->second, static_cast<int>(day * inst.periods_per_day + slot));
            });
        } else if (section == "END.") {
            saw_end = true;
            break;
        } else {
            warn("section '" + section + "' skipped (not part of the basic format)");
            bool found_next = false;
            while (next_tokens(tokens, line_no)) {
                if (is_section_header(tokens) || tokens[0] == "END.") {
                    found_next = true;
                    break;
                }
            }
            if (!found_next) break;
            continue;  // tokens holds the next section header
        }
        if (!next_tokens(tokens, line_no)) break;
    }

    if (!saw_end) throw ParseError(line_no, "missing 'END.' terminator");
    if (static_cast<long long>(inst.courses.size()) != declared_courses ||
        static_cast<long long>(inst.rooms.size()) != declared_rooms ||
        static_cast<long long>(inst.curricula.size()) != declared_curricula) {
        throw ParseError(line_no, "declared totals do not match parsed entity counts");
    }

    inst.finalize(unavailability);
    return inst;
}

Timetable Timetable::empty(const Instance& inst) {
    Timetable t;
    t.slots.assign(inst.total_lectures(), Slot{});
    return t;
}

void Timetable::canonicalize(const Instance& inst) {
    for (int c = 0; c < inst.course_count(); ++c) {
        const int begin = inst.lecture_begin(c);
        const int end = begin + inst.courses[c].lectures;
        std::sort(slots.begin() + begin, slots.begin() + end,
                  [](const Slot& a, const Slot& b) { return a.period < b.period; });
    }
}

std::string Violation::describe() const {
    std::string out = constraint + ": " + entities;
    if (period >= 0) out += " (period " + std::to_string(period) + ")";
    return out;
}

std::vector<Violation> validate_hard(const Instance& inst, const Timetable& t) {
    std::vector<Violation> out;
    const int L = inst.total_lectures();
    const int P = inst.periods();
    const int R = inst.room_count();

    if (static_cast<int>(t.slots.size()) != L) {
        out.push_back({"Lectures", "timetable does not cover all lectures", -1});
        return out;
    }

    for (int l = 0; l < L; ++l) {
        const auto& s = t.slots[l];
        const int c = inst.lecture_course(l);
        if (s.period < 0 || s.period >= P || s.room < 0 || s.room >= R) {
            out.push_back({"Lectures", "unplaced lecture of course " + inst.courses[c].id, s.period});
            continue;
        }
        if (!inst.available(c, s.period)) {
            out.push_back({"Availability", "course " + inst.courses[c].id, s.period});
        }
    }
    if (!out.empty() &&
        std::any_of(out.begin(), out.end(), [](const Violation& v) { return v.constraint == "Lectures"; })) {
        return out;
    }

    // Bucket lectures by period (counting sort; no per-period vectors).
    std::vector<int> count(P + 1, 0);
    for (const auto& s : t.slots) ++count[s.period + 1];
    std::vector<int> offset(count);
    for (int p = 0; p < P; ++p) offset[p + 1] += offset[p];
    std::vector<int> order(L);
    {
        std::vector<int> cursor(offset);
        for (int l = 0; l < L; ++l) order[cursor[t.slots[l].period]++] = l;
    }

    for (int p = 0; p < P; ++p) {
        const int begin = offset[p], end = offset[p + 1];
        for (int a = begin; a < end; ++a) {
            const int la = order[a], ca = inst.lecture_course(la);
            for (int b = a + 1; b < end; ++b) {
                const int lb = order[b], cb = inst.lecture_course(lb);
                if (t.slots[la].room == t.slots[lb].room) {
                    out.push_back({"RoomOccupancy",
                                   "room " + inst.rooms[t.slots[la].room].id + " hosts " + inst.courses[ca].id +
                                       " and " + inst.courses[cb].id,
                                   p});
                }
                if (ca == cb) {
                    out.push_back({"Lectures", "course " + inst.courses[ca].id + " twice in one period", p});
                } else if (inst.conflicts(ca, cb)) {
                    const bool teacher = inst.courses[ca].teacher == inst.courses[cb].teacher;
                    out.push_back({"Conflicts",
                                   inst.courses[ca].id + " vs " + inst.courses[cb].id +
                                       (teacher ? " (teacher)" : " (curriculum)"),
                                   p});
                }
            }
        }
    }
    return out;
}

namespace detail {

CoursePieces course_pieces(const Instance& inst, const Timetable& t, int course, const SoftWeights& w) {
    CoursePieces p;
    const int begin = inst.lecture_begin(course);
    const int end = begin + inst.courses[course].lectures;
    std::uint32_t day_mask = 0;
    std::uint64_t room_mask = 0;
    for (int l = begin; l < end; ++l) {
        const auto& s = t.slots[l];
        const long long excess = inst.courses[course].students - inst.rooms[s.room].capacity;
        if (excess > 0) p.room_capacity += w.room_capacity * excess;
        day_mask |= std::uint32_t{1} << (s.period / inst.periods_per_day);
        room_mask |= std::uint64_t{1} << s.room;
    }
    const int days_used = std::popcount(day_mask);
    if (inst.courses[course].lectures > 0) {
        if (days_used < inst.courses[course].min_working_days) {
            p.min_days = w.min_working_days * (inst.courses[course].min_working_days - days_used);
        }
        p.room_stability = w.room_stability * (std::popcount(room_mask) - 1);
    }
    return p;
}

long long isolated_lectures(const Instance& inst, const Timetable& t, int curriculum) {
    std::uint64_t mask = 0;
    for (int course : inst.curricula[curriculum].courses) {
        const int begin = inst.lecture_begin(course);
        const int end = begin + inst.courses[course].lectures;
        for (int l = begin; l < end; ++l) mask |= std::uint64_t{1} << t.slots[l].period;
    }
    long long isolated = 0;
    const int ppd = inst.periods_per_day;
    for (std::uint64_t m = mask; m;) {
        const int p = std::countr_zero(m);
        m &= m - 1;
        const int slot = p % ppd;
        const bool left = slot > 0 && (mask >> (p - 1) & 1);
        const bool right = slot < ppd - 1 && (mask >> (p + 1) & 1);
        if (!left && !right) ++isolated;
    }
    return isolated;
}

}  // namespace detail

namespace {

void require_feasible(const Instance& inst, const Timetable& t) {
    if (!validate_hard(inst, t).empty()) {
        throw std::invalid_argument("timetable violates hard constraints");
    }
}

}  // namespace

SoftCosts soft_costs(const Instance& inst, const Timetable& t, const SoftWeights& w) {
    require_feasible(inst, t);
    SoftCosts costs;
    for (int c = 0; c < inst.course_count(); ++c) {
        const detail::CoursePieces p = detail::course_pieces(inst, t, c, w);
        costs.room_capacity += p.room_capacity;
        costs.min_working_days += p.min_days;
        costs.room_stability += p.room_stability;
    }
    for (int u = 0; u < inst.curriculum_count(); ++u) {
        costs.isolated_lectures += w.isolated_lectures * detail::isolated_lectures(inst, t, u);
    }
    costs.total = costs.room_capacity + costs.min_working_days + costs.isolated_lectures + costs.room_stability;
    return costs;
}

SortedAllocation Allocation::sorted() const {
    return SortedAllocation::of(per_curriculum);
}

Allocation allocation(const Instance& inst, const Timetable& t, const SoftWeights& w) {
    require_feasible(inst, t);
    std::vector<long long> course_pen(inst.course_count(), 0);
    for (int c = 0; c < inst.course_count(); ++c) {
        course_pen[c] = detail::course_pieces(inst, t, c, w).sum();
    }
    Allocation a;
    a.per_curriculum.assign(inst.curriculum_count(), 0);
    for (int u = 0; u < inst.curriculum_count(); ++u) {
        long long total = w.isolated_lectures * detail::isolated_lectures(inst, t, u);
        for (int course : inst.curricula[u].courses) total += course_pen[course];
        a.per_curriculum[u] = total;
    }
    return a;
}

std::string write_solution(const Instance& inst, const Timetable& t) {
    std::string out;
    for (int c = 0; c < inst.course_count(); ++c) {
        const int begin = inst.lecture_begin(c);
        const int end = begin + inst.courses[c].lectures;
        std::vector<Timetable::Slot> placed(t.slots.begin() + begin, t.slots.begin() + end);
        std::sort(placed.begin(), placed.end(),
                  [](const Timetable::Slot& a, const Timetable::Slot& b) { return a.period < b.period; });
        for (const auto& s : placed) {
            if (s.period < 0) continue;
            out += inst.courses[c].id;
            out += ' ';
            out += inst.rooms[s.room].id;
            out += ' ';
            out += std::to_string(s.period / inst.periods_per_day);
            out += ' ';
            out += std::to_string(s.period % inst.periods_per_day);
            out += '\n';
        }
    }
    return out;
}

Timetable parse_solution(const Instance& inst, const std::string& text) {
    std::unordered_map<std::string, int> room_by_id;
    for (int r = 0; r < inst.room_count(); ++r) room_by_id[inst.rooms[r].id] = r;

    Timetable t = Timetable::empty(inst);
    std::vector<int> next_lecture(inst.course_count());
    for (int c = 0; c < inst.course_count(); ++c) next_lecture[c] = inst.lecture_begin(c);

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 4) throw ParseError(line_no, "solution line needs course, room, day, period");
        const int course = inst.course_index(tokens[0]);
        if (course < 0) throw ParseError(line_no, "unknown course '" + tokens[0] + "'");
        auto room_it = room_by_id.find(tokens[1]);
        if (room_it == room_by_id.end()) throw ParseError(line_no, "unknown room '" + tokens[1] + "'");
        const long long day = to_number(tokens[2], line_no, "day");
        const long long slot = to_number(tokens[3], line_no, "period");
        if (day < 0 || day >= inst.days || slot < 0 || slot >= inst.periods_per_day) {
            throw ParseError(line_no, "day/period out of range");
        }
        const int limit = inst.lecture_begin(course) + inst.courses[course].lectures;
        if (next_lecture[course] >= limit) {
            throw ParseError(line_no, "too many lectures for course '" + tokens[0] + "'");
        }
        t.slots[next_lecture[course]++] = {static_cast<int>(day * inst.periods_per_day + slot),
                                           room_it->second};
    }
    t.canonicalize(inst);
    return t;
}

}  // namespace fairtt
