    document.querySelector("a-scene").emit("game-state-event", "loaded");
    document.querySelector("a-scene").addEventListener(
        "game-state-event", (event) => {
        // Handle game state changes
    });
    document.querySelector("a-scene").addEventListener(
        "game-state-updated", (event) => {
        // Handle game state updates
    };
