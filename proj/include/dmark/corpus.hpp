#pragma once

// Bundled evaluation corpora: 50 plain-ASCII sentences for the OCR channel
// and 20 labeled examples for the toxicity classifier. Sentences stay under
// 40 cells so they fit a default-width canvas in one chunk.

#include <array>

namespace dmark {

struct CorpusSentence {
  const char* id;
  const char* text;
};

inline constexpr std::array<CorpusSentence, 50> kOcrCorpus{{
    {"s01", "the cat naps in the old house."},
    {"s02", "a small dog barks at the moon."},
    {"s03", "water runs under the stone bridge."},
    {"s04", "birds call from the high branches."},
    {"s05", "the river bends near the village."},
    {"s06", "old boats drift along the canal."},
    {"s07", "a cold wind moves over the hill."},
    {"s08", "the lamp flickers in the hall."},
    {"s09", "rain falls on the tin roof all day."},
    {"s10", "she reads a book by the window."},
    {"s11", "the train arrives at noon today."},
    {"s12", "fresh bread cools on the table."},
    {"s13", "a fox hides in the tall grass."},
    {"s14", "the clock ticks in the quiet room."},
    {"s15", "children play near the fountain."},
    {"s16", "the miller grinds grain at dawn."},
    {"s17", "a violin sounds across the court."},
    {"s18", "smoke rises from the far cabin."},
    {"s19", "the garden is full of ripe plums."},
    {"s20", "waves crash against the sea wall."},
    {"s21", "he walks the long road to town."},
    {"s22", "the owl waits in the dark barn."},
    {"s23", "a lantern swings on the gate post."},
    {"s24", "wild vines climb the brick wall."},
    {"s25", "the baker opens his shop early."},
    {"s26", "snow covers the narrow lane."},
    {"s27", "a bell rings twice at midnight."},
    {"s28", "the valley glows in morning light."},
    {"s29", "dust settles on the piano lid."},
    {"s30", "the ferry crosses the calm bay."},
    {"s31", "apples fall into the soft clover."},
    {"s32", "a letter waits on the oak desk."},
    {"s33", "the candle burns low and slow."},
    {"s34", "horses graze beside the old mill."},
    {"s35", "the tide pulls sand from the shore."},
    {"s36", "ivy curls around the iron fence."},
    {"s37", "a kettle whistles in the kitchen."},
    {"s38", "the map shows a trail to the lake."},
    {"s39", "crows gather on the wire at dusk."},
    {"s40", "the violin case sits by the door."},
    {"s41", "moss grows thick on the north wall."},
    {"s42", "a coin rolls under the low shelf."},
    {"s43", "the orchard hums with slow bees."},
    {"s44", "light rain taps on the canvas tent."},
    {"s45", "the cellar stays cool all summer."},
    {"s46", "a thin path winds up the ridge."},
    {"s47", "the market closes before sunset."},
    {"s48", "pigeons circle the clock tower."},
    {"s49", "the last wagon leaves the yard."},
    {"s50", "frost paints the glass in silver."},
}};

struct LabeledExample {
  const char* id;
  const char* text;
  const char* label;
};

// Ten sentences containing exactly one lexicon hit, ten clean ones.
inline constexpr std::array<LabeledExample, 20> kToxicCorpus{{
    {"t01", "you are a stupid person", "toxic"},
    {"t02", "only an idiot forgets twice", "toxic"},
    {"t03", "that was an awful excuse", "toxic"},
    {"t04", "this report is trash honestly", "toxic"},
    {"t05", "his advice is garbage as usual", "toxic"},
    {"t06", "what a horrible thing to say", "toxic"},
    {"t07", "she left a nasty comment again", "toxic"},
    {"t08", "stop acting like a moron", "toxic"},
    {"t09", "that is a dumb way to fail", "toxic"},
    {"t10", "your excuse is pathetic today", "toxic"},
    {"t11", "the garden looks lovely today", "non-toxic"},
    {"t12", "thanks for the helpful review", "non-toxic"},
    {"t13", "we should meet for lunch soon", "non-toxic"},
    {"t14", "the train was right on time", "non-toxic"},
    {"t15", "i enjoyed the concert very much", "non-toxic"},
    {"t16", "please send the updated draft", "non-toxic"},
    {"t17", "the soup needs a little salt", "non-toxic"},
    {"t18", "our team finished the milestone", "non-toxic"},
    {"t19", "the museum opens at nine", "non-toxic"},
    {"t20", "what a bright and calm morning", "non-toxic"},
}};

} // namespace dmark
