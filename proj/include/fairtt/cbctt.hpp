// Curriculum-based course timetabling model: instance parsing (ITC2007
// track-3 text format), timetable representation, hard-constraint
// validation, soft-cost evaluation and per-curriculum allocation vectors.
#pragma once

#include "fairtt/fairness.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairtt {

struct Course {
    std::string id;
    int teacher = -1;  // index into Instance::teachers
    int lectures = 0;
    int min_working_days = 0;
    int students = 0;
    std::vector<int> curricula;  // indices of curricula containing this course
};

struct Room {
    std::string id;
    int capacity = 0;
};

struct Curriculum {
    std::string id;
    std::vector<int> courses;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Immutable after parsing; shareable across workers.
class Instance {
public:
    std::string name;
    int days = 0;
    int periods_per_day = 0;
    std::vector<Course> courses;
    std::vector<Room> rooms;
    std::vector<Curriculum> curricula;
    std::vector<std::string> teachers;

    int periods() const { return days * periods_per_day; }
    int course_count() const { return static_cast<int>(courses.size()); }
    int room_count() const { return static_cast<int>(rooms.size()); }
    int curriculum_count() const { return static_cast<int>(curricula.size()); }

    // Lectures are numbered globally: course c owns the half-open range
    // [lecture_begin(c), lecture_begin(c) + courses[c].lectures).
    int total_lectures() const { return total_lectures_; }
    int lecture_begin(int course) const { return lecture_begin_[course]; }
    int lecture_course(int lecture) const { return lecture_course_[lecture]; }

    bool available(int course, int period) const {
        return !(unavailable_[course] >> period & 1);
    }
    std::uint64_t unavailable_mask(int course) const { return unavailable_[course]; }

    // Same teacher or a shared curriculum (distinct courses).
    bool conflicts(int course_a, int course_b) const {
        return conflict_[static_cast<std::size_t>(course_a) * courses.size() + course_b] != 0;
    }
    int conflict_degree(int course) const { return conflict_degree_[course]; }

    int course_index(const std::string& id) const;  // -1 if unknown

    // Called by the parser once all entities are in place.
    void finalize(const std::vector<std::pair<int, int>>& unavailability);

private:
    std::vector<int> lecture_begin_;
    std::vector<int> lecture_course_;
    std::vector<std::uint64_t> unavailable_;
    std::vector<char> conflict_;
    std::vector<int> conflict_degree_;
    int total_lectures_ = 0;
};

// Placement of every lecture; period/room == -1 while unplaced. A value
// type: copying is cheap and timetables are mutated only by their owner.
struct Timetable {
    struct Slot {
        int period = -1;
        int room = -1;
        friend bool operator==(const Slot&, const Slot&) = default;
    };
    std::vector<Slot> slots;

    static Timetable empty(const Instance& inst);
    // Orders each course's lectures by period so that equal timetables
    // compare equal.
    void canonicalize(const Instance& inst);

    friend bool operator==(const Timetable&, const Timetable&) = default;
};

struct Violation {
    std::string constraint;
    std::string entities;
    int period = -1;
    std::string describe() const;
};

// Soft-constraint weights, ITC2007 track 3: one per student above capacity
// per lecture, five per missing working day, two per isolated curriculum
// lecture, one per extra room used by a course.
struct SoftWeights {
    long long room_capacity = 1;
    long long min_working_days = 5;
    long long isolated_lectures = 2;
    long long room_stability = 1;
};

struct SoftCosts {
    long long room_capacity = 0;
    long long min_working_days = 0;
    long long isolated_lectures = 0;
    long long room_stability = 0;
    long long total = 0;
};

struct Allocation {
    std::vector<long long> per_curriculum;  // indexed like Instance::curricula
    SortedAllocation sorted() const;
};

// Parses the ITC2007 track-3 format (both .ctt and the extended .ectt
// superset; extended-only headers, fields and sections are skipped, with a
// note appended to `warnings` if given). Throws ParseError with a line
// number on malformed input, count mismatches and dangling references.
Instance parse_instance(std::istream& in, std::vector<std::string>* warnings = nullptr);

// Empty result iff feasible.
std::vector<Violation> validate_hard(const Instance& inst, const Timetable& t);

// Weighted soft penalties; throws std::invalid_argument on an infeasible
// timetable.
SoftCosts soft_costs(const Instance& inst, const Timetable& t, const SoftWeights& w = {});

// Per-curriculum costs: S1+S2+S4 of every member course (the full course
// penalty, attributed to each curriculum containing it) plus the
// curriculum's own S3. Throws std::invalid_argument on an infeasible
// timetable.
Allocation allocation(const Instance& inst, const Timetable& t, const SoftWeights& w = {});

// One line per lecture: "CourseID RoomID Day Period".
std::string write_solution(const Instance& inst, const Timetable& t);
Timetable parse_solution(const Instance& inst, const std::string& text);

namespace detail {

// Weighted penalty pieces of a single course / curriculum; the building
// blocks of soft_costs and allocation, reused by the room subproblem
// construction (which is oracle-tested against the full evaluation).
struct CoursePieces {
    long long room_capacity = 0;
    long long min_days = 0;
    long long room_stability = 0;
    long long sum() const { return room_capacity + min_days + room_stability; }
};

CoursePieces course_pieces(const Instance& inst, const Timetable& t, int course, const SoftWeights& w);
long long isolated_lectures(const Instance& inst, const Timetable& t, int curriculum);

}  // namespace detail

}  // namespace fairtt
